// Copyright 2026 The mtcorpus Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "mtcorpus/filters.h"

#include <algorithm>
#include <limits>
#include <unordered_map>
#include <unordered_set>

#include "mtcorpus/error.h"
#include "mtcorpus/metrics.h"
#include "mtcorpus/utf8.h"

namespace mtcorpus {

using nlohmann::json;

namespace {

bool IsTerminator(char32_t cp) {
  return cp == '.' || cp == '!' || cp == '?' || cp == 0x0964;
}

bool IsClosing(char32_t cp) {
  switch (cp) {
    case '"': case '\'': case ')': case ']': case '}':
    case 0x2019: case 0x201D: case 0x00BB:
      return true;
    default:
      return false;
  }
}

bool IsOpening(char32_t cp) {
  switch (cp) {
    case '"': case '\'': case '(': case '[': case '{':
    case 0x2018: case 0x201C: case 0x00AB:
      return true;
    default:
      return false;
  }
}

bool IsCaselessLetter(char32_t cp) {
  if (cp >= 0x0900 && cp <= 0x0DFF) {  // Indic scripts, minus digits/dandas
    return !utf8::IsDigit(cp) && cp != 0x0964 && cp != 0x0965 &&
           !utf8::IsPunct(cp);
  }
  return (cp >= 0x0590 && cp <= 0x06FF) ||  // Hebrew, Arabic
         (cp >= 0x0E00 && cp <= 0x0E7F) ||  // Thai
         (cp >= 0x3040 && cp <= 0x30FF) ||  // Kana
         (cp >= 0x4E00 && cp <= 0x9FFF) ||  // CJK
         (cp >= 0xAC00 && cp <= 0xD7AF);    // Hangul
}

bool StartsSentence(char32_t cp) {
  return utf8::IsUpper(cp) || utf8::IsDigit(cp) || IsCaselessLetter(cp);
}

// The word immediately before byte offset `dot` (exclusive), lowercased and
// stripped of opening punctuation.
std::string WordBefore(std::string_view text, std::size_t dot) {
  std::size_t begin = dot;
  while (begin > 0) {
    std::size_t prev = begin - 1;
    while (prev > 0 && !utf8::IsCharBoundary(text, prev)) --prev;
    std::size_t probe = prev;
    if (utf8::IsSpace(utf8::Next(text, probe))) break;
    begin = prev;
  }
  while (begin < dot) {
    std::size_t probe = begin;
    if (!IsOpening(utf8::Next(text, probe))) break;
    begin = probe;
  }
  return utf8::ToLower(text.substr(begin, dot - begin));
}

bool IsAbbreviation(const std::string &word) {
  static const std::unordered_set<std::string> kSet(
      AbbreviationList().begin(), AbbreviationList().end());
  return kSet.contains(word);
}

std::vector<std::pair<std::size_t, std::size_t>> SplitOffsets(
    std::string_view text) {
  std::vector<std::pair<std::size_t, std::size_t>> spans;
  const std::size_t npos = std::string_view::npos;
  std::size_t start = npos;
  std::size_t last_end = 0;  // end of the last non-space code point
  std::size_t pos = 0;
  while (pos < text.size()) {
    const std::size_t here = pos;
    const char32_t cp = utf8::Next(text, pos);
    if (utf8::IsSpace(cp)) continue;
    if (start == npos) start = here;
    last_end = pos;
    if (!IsTerminator(cp)) continue;

    // Absorb repeated terminators and closing quotes/brackets.
    std::size_t end = pos;
    while (end < text.size()) {
      std::size_t probe = end;
      const char32_t next = utf8::Next(text, probe);
      if (!IsTerminator(next) && !IsClosing(next)) break;
      end = probe;
    }
    // Require whitespace, then (after opening quotes) a sentence starter.
    std::size_t look = end;
    bool saw_space = false;
    while (look < text.size()) {
      std::size_t probe = look;
      if (!utf8::IsSpace(utf8::Next(text, probe))) break;
      saw_space = true;
      look = probe;
    }
    if (!saw_space || look >= text.size()) continue;
    std::size_t probe = look;
    char32_t next = utf8::Next(text, probe);
    while (IsOpening(next) && probe < text.size()) next = utf8::Next(text, probe);
    if (!StartsSentence(next)) continue;
    if (cp == '.' && IsAbbreviation(WordBefore(text, here))) continue;

    spans.emplace_back(start, end);
    start = npos;
    pos = end;
    last_end = end;
  }
  if (start != npos) spans.emplace_back(start, last_end);
  return spans;
}

}  // namespace

const std::vector<std::string> &AbbreviationList() {
  static const std::vector<std::string> kList = {
      "dr",   "mr",   "mrs",  "ms",   "prof", "sr",   "jr",   "st",
      "vs",   "e.g",  "i.e",  "jl",   "fig",  "figs", "inc",  "ltd",
      "co",   "corp", "mt",   "gen",  "col",  "lt",   "sgt",  "capt",
      "gov",  "sen",  "rep",  "rev",  "hon",  "jan",  "feb",  "mar",
      "apr",  "jun",  "jul",  "aug",  "sep",  "sept", "oct",  "nov",
      "dec",  "u.s",  "u.k",  "a.m",  "p.m",  "approx", "dept", "est",
      "vol",  "pp",   "ed",   "eds",  "al",   "ca",   "cf",   "op",
      "dll",  "dsb",  "tsb",  "yth",  "bpk",  "sdr"};
  return kList;
}

std::vector<std::string_view> SplitSentences(std::string_view text) {
  std::vector<std::string_view> out;
  for (const auto &[b, e] : SplitOffsets(text)) {
    out.push_back(text.substr(b, e - b));
  }
  return out;
}

std::vector<SentenceSpan> SegmentSentences(const Document &doc) {
  std::vector<SentenceSpan> spans;
  std::size_t index = 0;
  for (const auto &[b, e] : SplitOffsets(doc.text)) {
    spans.push_back({doc.doc_id, index++, b, e});
  }
  return spans;
}

void LengthBounds::Validate() const {
  if (min_tokens < 1 || min_tokens > max_tokens) {
    throw Error("invalid length bounds [" + std::to_string(min_tokens) + ", " +
                std::to_string(max_tokens) + "]");
  }
}

LengthBounds ProfileBounds(std::string_view profile) {
  if (profile == "id") return {3, 250};
  if (profile == "ta") return {4, 150};
  throw Error("unknown language profile: " + std::string(profile));
}

void FilterReport::Merge(const FilterReport &other) {
  kept += other.kept;
  dropped += other.dropped;
  for (const auto &[k, v] : other.reasons) reasons[k] += v;
  dropped_ids.insert(dropped_ids.end(), other.dropped_ids.begin(),
                     other.dropped_ids.end());
}

json ToJson(const FilterReport &r) {
  return {{"kept", r.kept},
          {"dropped", r.dropped},
          {"reasons", r.reasons},
          {"dropped_ids", r.dropped_ids}};
}

PreFilterResult PreMtFilter(std::span<const Document> docs,
                            const LengthBounds &bounds) {
  bounds.Validate();
  PreFilterResult out;
  for (const auto &doc : docs) {
    const char *reason = nullptr;
    for (const auto &sentence : SplitSentences(doc.text)) {
      const std::size_t n = CountWords(sentence);
      if (n < bounds.min_tokens) {
        reason = "too_short";
      } else if (n > bounds.max_tokens) {
        reason = "too_long";
      }
      if (reason) break;
    }
    if (reason) {
      ++out.report.dropped;
      ++out.report.reasons[reason];
      out.report.dropped_ids.push_back(doc.doc_id);
    } else {
      ++out.report.kept;
      out.kept.push_back(doc);
    }
  }
  return out;
}

json ToJson(const SentenceRecord &s) {
  return {{"doc_id", s.doc_id}, {"index", s.index}, {"text", s.text}};
}

SentenceRecord SentenceRecordFromJson(const json &j, std::size_t line_no) {
  if (!j.is_object()) throw ParseError("sentence record is not an object", line_no);
  SentenceRecord s;
  for (const char *field : {"doc_id", "index", "text"}) {
    if (!j.contains(field)) {
      throw ParseError(std::string("missing \"") + field + "\" field", line_no);
    }
  }
  try {
    const auto &id = j["doc_id"];
    s.doc_id = id.is_string() ? id.get<std::string>() : id.dump();
    s.index = j["index"].get<std::size_t>();
    s.text = j["text"].get<std::string>();
  } catch (const json::exception &e) {
    throw ParseError(std::string("bad sentence record: ") + e.what(), line_no);
  }
  return s;
}

std::vector<SentenceRecord> ReadSentences(const std::string &path) {
  std::vector<SentenceRecord> out;
  std::size_t line_no = 0;
  for (const auto &row : ReadJsonLines(path)) {
    out.push_back(SentenceRecordFromJson(row, ++line_no));
  }
  return out;
}

void WriteSentences(const std::string &path,
                    std::span<const SentenceRecord> records) {
  std::vector<json> rows;
  rows.reserve(records.size());
  for (const auto &r : records) rows.push_back(ToJson(r));
  WriteJsonLines(path, rows);
}

std::vector<SentenceRecord> ToSentenceRecords(std::span<const Document> docs) {
  std::vector<SentenceRecord> out;
  for (const auto &doc : docs) {
    for (const auto &span : SegmentSentences(doc)) {
      out.push_back({doc.doc_id, span.index, std::string(span.View(doc.text))});
    }
  }
  return out;
}

PostFilterResult PostMtFilter(std::span<const SentenceRecord> source,
                              std::span<const SentenceRecord> target,
                              double max_ratio) {
  using Key = std::pair<std::string, std::size_t>;
  struct KeyHash {
    std::size_t operator()(const Key &k) const {
      return std::hash<std::string>()(k.first) * 31 + k.second;
    }
  };
  std::unordered_map<Key, const SentenceRecord *, KeyHash> by_key;
  for (const auto &t : target) {
    if (!by_key.emplace(Key{t.doc_id, t.index}, &t).second) {
      throw Error("duplicate target sentence doc " + t.doc_id + " index " +
                  std::to_string(t.index));
    }
  }

  // Group source sentences by document in first-appearance order.
  std::vector<std::string> order;
  std::unordered_map<std::string, std::vector<const SentenceRecord *>> groups;
  std::size_t aligned = 0;
  for (const auto &s : source) {
    auto [it, fresh] = groups.try_emplace(s.doc_id);
    if (fresh) order.push_back(s.doc_id);
    it->second.push_back(&s);
    if (!by_key.contains(Key{s.doc_id, s.index})) {
      throw Error("missing alignment for doc " + s.doc_id + " index " +
                  std::to_string(s.index));
    }
    ++aligned;
  }
  if (aligned != target.size()) {
    for (const auto &t : target) {
      const auto it = groups.find(t.doc_id);
      const bool found =
          it != groups.end() &&
          std::any_of(it->second.begin(), it->second.end(),
                      [&](const SentenceRecord *s) { return s->index == t.index; });
      if (!found) {
        throw Error("missing alignment for doc " + t.doc_id + " index " +
                    std::to_string(t.index));
      }
    }
  }

  PostFilterResult out;
  for (const auto &doc_id : order) {
    bool drop = false;
    const char *reason = "ratio_exceeded";
    std::vector<const SentenceRecord *> targets;
    for (const SentenceRecord *s : groups[doc_id]) {
      const SentenceRecord *t = by_key.at(Key{s->doc_id, s->index});
      targets.push_back(t);
      SentencePairRatio r{doc_id, s->index, CountWords(s->text),
                          CountWords(t->text), 0.0};
      if (r.source_tokens == 0) {
        r.ratio = r.target_tokens == 0
                      ? 0.0
                      : std::numeric_limits<double>::infinity();
      } else {
        r.ratio = static_cast<double>(r.target_tokens) /
                  static_cast<double>(r.source_tokens);
      }
      if (!drop && r.ratio > max_ratio) {
        drop = true;
        if (r.source_tokens == 0) reason = "empty_source";
      }
      out.ratios.push_back(std::move(r));
    }
    if (drop) {
      ++out.report.dropped;
      ++out.report.reasons[reason];
      out.report.dropped_ids.push_back(doc_id);
      continue;
    }
    ++out.report.kept;
    for (const SentenceRecord *s : groups[doc_id]) out.kept_source.push_back(*s);
    for (const SentenceRecord *t : targets) out.kept_target.push_back(*t);
  }
  return out;
}

std::vector<Document> ReconstructDocuments(
    std::span<const SentenceRecord> records,
    std::span<const std::string> order) {
  std::unordered_map<std::string, std::vector<const SentenceRecord *>> groups;
  for (const auto &r : records) groups[r.doc_id].push_back(&r);

  std::vector<std::string> ids;
  std::unordered_set<std::string> placed;
  for (const auto &id : order) {
    if (groups.contains(id) && placed.insert(id).second) ids.push_back(id);
  }
  std::vector<std::string> rest;
  for (const auto &[id, _] : groups) {
    if (!placed.contains(id)) rest.push_back(id);
  }
  std::sort(rest.begin(), rest.end());
  ids.insert(ids.end(), rest.begin(), rest.end());

  std::vector<Document> docs;
  docs.reserve(ids.size());
  for (const auto &id : ids) {
    auto &group = groups[id];
    std::sort(group.begin(), group.end(),
              [](const SentenceRecord *a, const SentenceRecord *b) {
                return a->index < b->index;
              });
    Document doc{id, "", {}};
    for (std::size_t k = 0; k < group.size(); ++k) {
      if (group[k]->index < k) {
        throw Error("doc " + id + " has duplicate sentence " +
                    std::to_string(group[k]->index));
      }
      if (group[k]->index > k) {
        throw Error("doc " + id + " missing sentence " + std::to_string(k));
      }
      if (k > 0) doc.text += ' ';
      doc.text += group[k]->text;
    }
    docs.push_back(std::move(doc));
  }
  return docs;
}

ParallelCorpora EnforceParallelism(std::span<const Document> natural,
                                   std::span<const Document> simplified) {
  const JoinResult joined = JoinParallel(natural, simplified);
  ParallelCorpora out;
  out.natural.reserve(joined.pairs.size());
  out.simplified.reserve(joined.pairs.size());
  for (const auto &p : joined.pairs) {
    out.natural.push_back(p.side_a);
    out.simplified.push_back(p.side_b);
  }
  out.report.dropped_natural = joined.unmatched_a;
  out.report.dropped_simplified = joined.unmatched_b;
  return out;
}

}  // namespace mtcorpus
