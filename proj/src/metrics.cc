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

#include "mtcorpus/metrics.h"

#include <algorithm>
#include <cmath>
#include <unordered_map>

#include "mtcorpus/error.h"
#include "mtcorpus/filters.h"
#include "mtcorpus/utf8.h"

namespace mtcorpus {

using nlohmann::json;

namespace {

// Calls fn(raw_token) for each maximal run of non-space code points.
template <typename Fn>
void ForEachRawToken(std::string_view text, Fn &&fn) {
  std::size_t pos = 0;
  std::size_t start = std::string_view::npos;
  while (pos < text.size()) {
    const std::size_t here = pos;
    const char32_t cp = utf8::Next(text, pos);
    if (utf8::IsSpace(cp)) {
      if (start != std::string_view::npos) {
        fn(text.substr(start, here - start));
        start = std::string_view::npos;
      }
    } else if (start == std::string_view::npos) {
      start = here;
    }
  }
  if (start != std::string_view::npos) fn(text.substr(start));
}

// Removes leading and trailing punctuation code points.
std::string_view StripPunct(std::string_view tok) {
  std::size_t begin = 0;
  while (begin < tok.size()) {
    std::size_t next = begin;
    if (!utf8::IsPunct(utf8::Next(tok, next))) break;
    begin = next;
  }
  std::size_t end = tok.size();
  while (end > begin) {
    std::size_t back = end - 1;
    while (back > begin && !utf8::IsCharBoundary(tok, back)) --back;
    std::size_t probe = back;
    if (!utf8::IsPunct(utf8::Next(tok, probe))) break;
    end = back;
  }
  return tok.substr(begin, end - begin);
}

bool IsVowel(char c) {
  switch (c) {
    case 'a': case 'e': case 'i': case 'o': case 'u': case 'y':
      return true;
    default:
      return false;
  }
}

double Percent(std::size_t count, std::size_t total) {
  return 100.0 * static_cast<double>(count) / static_cast<double>(total);
}

double OverlapF1(std::size_t overlap, std::size_t a, std::size_t b) {
  if (a + b == 0) return 1.0;
  return 2.0 * static_cast<double>(overlap) / static_cast<double>(a + b);
}

}  // namespace

std::vector<std::string> WordTokenize(std::string_view text) {
  std::vector<std::string> words;
  ForEachRawToken(text, [&](std::string_view raw) {
    const std::string_view core = StripPunct(raw);
    if (!core.empty()) words.push_back(utf8::ToLower(core));
  });
  return words;
}

std::size_t CountWords(std::string_view text) {
  std::size_t n = 0;
  ForEachRawToken(text, [&](std::string_view raw) {
    if (!StripPunct(raw).empty()) ++n;
  });
  return n;
}

json ToJson(const PerDatasetStats &s) {
  return {{"total_words", s.total_words},
          {"types", s.types},
          {"ttr", s.ttr},
          {"unigram_entropy", s.unigram_entropy}};
}

double TypeTokenRatio(std::uint64_t types, std::uint64_t total_words) {
  if (total_words == 0) throw Error("no tokens");
  return 100.0 * static_cast<double>(types) / static_cast<double>(total_words);
}

double UnigramEntropy(std::span<const std::uint64_t> counts) {
  long double total = 0;
  for (auto c : counts) total += c;
  if (total == 0) throw Error("entropy of an all-zero frequency table");
  long double h = 0;
  for (auto c : counts) {
    if (c == 0) continue;
    const long double p = c / total;
    h -= p * std::log2(p);
  }
  return static_cast<double>(std::max<long double>(h, 0));
}

double UnigramEntropy(const std::map<std::string, std::uint64_t> &freq) {
  std::vector<std::uint64_t> counts;
  counts.reserve(freq.size());
  for (const auto &[w, c] : freq) counts.push_back(c);
  return UnigramEntropy(counts);
}

void WordCounter::AddText(std::string_view text) {
  ForEachRawToken(text, [&](std::string_view raw) {
    const std::string_view core = StripPunct(raw);
    if (core.empty()) return;
    ++freq_[utf8::ToLower(core)];
    ++total_;
  });
}

void WordCounter::AddWord(std::string_view word, std::uint64_t count) {
  freq_[std::string(word)] += count;
  total_ += count;
}

void WordCounter::Merge(const WordCounter &other) {
  for (const auto &[w, c] : other.freq_) freq_[w] += c;
  total_ += other.total_;
}

PerDatasetStats WordCounter::Stats() const {
  if (total_ == 0) throw Error("no tokens");
  PerDatasetStats s;
  s.total_words = total_;
  s.types = freq_.size();
  s.ttr = TypeTokenRatio(s.types, s.total_words);
  std::vector<std::uint64_t> counts;
  counts.reserve(freq_.size());
  for (const auto &[w, c] : freq_) counts.push_back(c);
  s.unigram_entropy = UnigramEntropy(counts);
  return s;
}

PerDatasetStats ComputePerDatasetStats(CorpusReader &reader) {
  WordCounter counter;
  while (auto doc = reader.Next()) counter.AddText(doc->text);
  return counter.Stats();
}

PerDatasetStats ComputePerDatasetStats(std::span<const Document> docs) {
  WordCounter counter;
  for (const auto &d : docs) counter.AddText(d.text);
  return counter.Stats();
}

int CountSyllables(std::string_view word) {
  int groups = 0;
  bool in_group = false;
  char last = 0;
  for (char raw : word) {
    const char c = (raw >= 'A' && raw <= 'Z') ? raw + 32 : raw;
    const bool vowel = IsVowel(c);
    if (vowel && !in_group) ++groups;
    in_group = vowel;
    last = c;
  }
  if (last == 'e' && groups > 1) --groups;
  return std::max(groups, 1);
}

double FleschReadingEase(std::string_view text) {
  const auto words = WordTokenize(text);
  if (words.empty()) throw Error("Flesch reading ease of text with no words");
  const auto sentences = std::max<std::size_t>(SplitSentences(text).size(), 1);
  std::size_t syllables = 0;
  for (const auto &w : words) syllables += CountSyllables(w);
  const double n_words = static_cast<double>(words.size());
  return 206.835 - 1.015 * (n_words / static_cast<double>(sentences)) -
         84.6 * (static_cast<double>(syllables) / n_words);
}

double ClipFre(double raw) {
  if (std::isnan(raw)) throw Error("FRE is NaN");
  return std::clamp(raw, 0.0, 100.0);
}

double CompressionLevel(std::string_view natural,
                        std::string_view simplified) {
  const std::size_t base = CountWords(natural);
  if (base == 0) throw Error("compression level: natural side has no words");
  return static_cast<double>(CountWords(simplified)) /
         static_cast<double>(base);
}

std::int64_t SentenceSplitDifference(std::string_view natural,
                                     std::string_view simplified) {
  return static_cast<std::int64_t>(SplitSentences(simplified).size()) -
         static_cast<std::int64_t>(SplitSentences(natural).size());
}

void ValidateTree(const ParsedSentence &s) {
  const int n = static_cast<int>(s.heads.size());
  if (n == 0) throw Error("dependency tree has no tokens");
  if (!s.tokens.empty() && s.tokens.size() != s.heads.size()) {
    throw Error("dependency tree: token/head count mismatch");
  }
  int roots = 0;
  for (int h : s.heads) {
    if (h == -1) {
      ++roots;
    } else if (h < 0 || h >= n) {
      throw Error("dependency tree: head index out of range");
    }
  }
  if (roots != 1) {
    throw Error("dependency tree has " + std::to_string(roots) + " roots");
  }
  // Every node must reach the root within n steps.
  for (int i = 0; i < n; ++i) {
    int node = i;
    int steps = 0;
    while (s.heads[node] != -1) {
      node = s.heads[node];
      if (++steps > n) throw Error("dependency tree contains a cycle");
    }
  }
}

int DependencyTreeDepth(const ParsedSentence &s) {
  ValidateTree(s);
  const int n = static_cast<int>(s.heads.size());
  std::vector<int> depth(n, 0);
  int best = 0;
  for (int i = 0; i < n; ++i) {
    std::vector<int> path;
    int node = i;
    while (node != -1 && depth[node] == 0) {
      path.push_back(node);
      node = s.heads[node];
    }
    int d = node == -1 ? 0 : depth[node];
    for (auto it = path.rbegin(); it != path.rend(); ++it) depth[*it] = ++d;
    best = std::max(best, depth[i]);
  }
  return best;
}

std::optional<double> DepthRatio(std::span<const ParsedSentence> natural,
                                 std::span<const ParsedSentence> simplified) {
  if (natural.empty() || simplified.empty()) return std::nullopt;
  int nat = 0;
  int simp = 0;
  for (const auto &s : natural) nat = std::max(nat, DependencyTreeDepth(s));
  for (const auto &s : simplified) simp = std::max(simp, DependencyTreeDepth(s));
  return static_cast<double>(simp) / static_cast<double>(nat);
}

double Rouge2(std::span<const std::string> candidate,
              std::span<const std::string> reference) {
  if (std::equal(candidate.begin(), candidate.end(), reference.begin(),
                 reference.end())) {
    return 1.0;
  }
  if (candidate.size() < 2 || reference.size() < 2) {
    std::unordered_map<std::string_view, long> counts;
    for (const auto &w : reference) ++counts[w];
    std::size_t overlap = 0;
    for (const auto &w : candidate) {
      auto it = counts.find(w);
      if (it != counts.end() && it->second > 0) {
        --it->second;
        ++overlap;
      }
    }
    return OverlapF1(overlap, candidate.size(), reference.size());
  }
  std::unordered_map<std::string, long> counts;
  std::string key;
  for (std::size_t i = 0; i + 1 < reference.size(); ++i) {
    key = reference[i];
    key += '\0';
    key += reference[i + 1];
    ++counts[key];
  }
  std::size_t overlap = 0;
  for (std::size_t i = 0; i + 1 < candidate.size(); ++i) {
    key = candidate[i];
    key += '\0';
    key += candidate[i + 1];
    auto it = counts.find(key);
    if (it != counts.end() && it->second > 0) {
      --it->second;
      ++overlap;
    }
  }
  return OverlapF1(overlap, candidate.size() - 1, reference.size() - 1);
}

double Rouge2(std::string_view candidate, std::string_view reference) {
  return Rouge2(WordTokenize(candidate), WordTokenize(reference));
}

std::size_t LcsLength(std::span<const std::string> a,
                      std::span<const std::string> b) {
  std::vector<std::size_t> prev(b.size() + 1, 0), cur(b.size() + 1, 0);
  for (std::size_t i = 1; i <= a.size(); ++i) {
    for (std::size_t j = 1; j <= b.size(); ++j) {
      cur[j] = a[i - 1] == b[j - 1] ? prev[j - 1] + 1
                                    : std::max(prev[j], cur[j - 1]);
    }
    std::swap(prev, cur);
  }
  return prev[b.size()];
}

double RougeL(std::span<const std::string> candidate,
              std::span<const std::string> reference) {
  return OverlapF1(LcsLength(candidate, reference), candidate.size(),
                   reference.size());
}

double RougeL(std::string_view candidate, std::string_view reference) {
  return RougeL(WordTokenize(candidate), WordTokenize(reference));
}

OverlapBucket BucketOf(double r2) {
  if (!(r2 >= 0.0 && r2 <= 1.0)) {
    throw Error("ROUGE-2 value out of [0, 1]: " + std::to_string(r2));
  }
  if (r2 == 1.0) return OverlapBucket::kExactMatch;
  if (r2 > 0.8) return OverlapBucket::kHigh;
  if (r2 > 0.4) return OverlapBucket::kMedium;
  if (r2 > 0.0) return OverlapBucket::kLow;
  return OverlapBucket::kExactMismatch;
}

std::string_view BucketName(OverlapBucket b) {
  switch (b) {
    case OverlapBucket::kExactMatch: return "exact_match";
    case OverlapBucket::kHigh: return "high";
    case OverlapBucket::kMedium: return "medium";
    case OverlapBucket::kLow: return "low";
    case OverlapBucket::kExactMismatch: return "exact_mismatch";
  }
  return "";
}

double CosineSimilarity(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) {
    throw Error("cosine similarity: dimension mismatch (" +
                std::to_string(a.size()) + " vs " + std::to_string(b.size()) +
                ")");
  }
  double dot = 0, na = 0, nb = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    dot += a[i] * b[i];
    na += a[i] * a[i];
    nb += b[i] * b[i];
  }
  if (na == 0 || nb == 0) throw Error("cosine similarity of a zero vector");
  return std::clamp(dot / (std::sqrt(na) * std::sqrt(nb)), -1.0, 1.0);
}

MetricRecord ComputeMetrics(const ParallelPair &pair,
                            const PairInputs &inputs) {
  const std::string &natural = pair.side_a.text;
  const std::string &simplified = pair.side_b.text;
  MetricRecord r;
  r.pair_id = pair.pair_id;
  try {
    r.fre_a = FleschReadingEase(natural);
    r.fre_b = FleschReadingEase(simplified);
    r.compression = CompressionLevel(natural, simplified);
    r.split_diff = SentenceSplitDifference(natural, simplified);
    r.depth_ratio =
        DepthRatio(inputs.natural_parses, inputs.simplified_parses);
    const auto nat_words = WordTokenize(natural);
    const auto simp_words = WordTokenize(simplified);
    r.rouge2 = Rouge2(simp_words, nat_words);
    r.rougeL = RougeL(simp_words, nat_words);
    if (inputs.natural_embedding && inputs.simplified_embedding) {
      r.cosine = CosineSimilarity(*inputs.natural_embedding,
                                  *inputs.simplified_embedding);
    }
  } catch (const Error &e) {
    throw Error("pair " + pair.pair_id + ": " + e.what());
  }
  return r;
}

json ToJson(const CrossDatasetStats &s) {
  json j = {{"pairs", s.pairs},
            {"pct_compression_lt_80", s.pct_compression_lt_80},
            {"pct_exact_match", s.pct_exact_match},
            {"pct_high", s.pct_high},
            {"pct_medium", s.pct_medium},
            {"pct_low", s.pct_low},
            {"pct_exact_mismatch", s.pct_exact_mismatch}};
  j["pct_sim_gt_80"] = s.pct_sim_gt_80 ? json(*s.pct_sim_gt_80) : json(nullptr);
  return j;
}

CrossDatasetStats CrossDatasetStatsFromJson(const json &j) {
  CrossDatasetStats s;
  s.pairs = j.value("pairs", std::size_t{0});
  s.pct_compression_lt_80 = j.at("pct_compression_lt_80").get<double>();
  s.pct_exact_match = j.at("pct_exact_match").get<double>();
  s.pct_high = j.at("pct_high").get<double>();
  s.pct_medium = j.at("pct_medium").get<double>();
  s.pct_low = j.at("pct_low").get<double>();
  s.pct_exact_mismatch = j.at("pct_exact_mismatch").get<double>();
  if (j.contains("pct_sim_gt_80") && !j["pct_sim_gt_80"].is_null()) {
    s.pct_sim_gt_80 = j["pct_sim_gt_80"].get<double>();
  }
  return s;
}

CrossDatasetStats ComputeCrossDatasetStats(
    std::span<const MetricRecord> records) {
  if (records.empty()) throw Error("cross-dataset stats of an empty pair set");
  std::size_t buckets[5] = {0, 0, 0, 0, 0};
  std::size_t compressed = 0;
  std::size_t with_cosine = 0;
  std::size_t similar = 0;
  for (const auto &r : records) {
    ++buckets[static_cast<int>(BucketOf(r.rouge2))];
    if (r.compression < 0.8) ++compressed;
    if (r.cosine) {
      ++with_cosine;
      if (*r.cosine > 0.8) ++similar;
    }
  }
  const std::size_t n = records.size();
  CrossDatasetStats s;
  s.pairs = n;
  s.pct_compression_lt_80 = Percent(compressed, n);
  s.pct_exact_match = Percent(buckets[0], n);
  s.pct_high = Percent(buckets[1], n);
  s.pct_medium = Percent(buckets[2], n);
  s.pct_low = Percent(buckets[3], n);
  s.pct_exact_mismatch = Percent(buckets[4], n);
  if (with_cosine > 0) s.pct_sim_gt_80 = Percent(similar, with_cosine);
  return s;
}

CrossDatasetStats ComputeCrossDatasetStats(std::span<const ParallelPair> pairs,
                                           const EmbeddingLookup &embeddings) {
  std::vector<MetricRecord> records;
  records.reserve(pairs.size());
  for (const auto &p : pairs) {
    std::optional<std::vector<double>> ea, eb;
    if (embeddings) {
      ea = embeddings(p.pair_id, false);
      eb = embeddings(p.pair_id, true);
    }
    PairInputs in;
    if (ea && eb) {
      in.natural_embedding = std::span<const double>(*ea);
      in.simplified_embedding = std::span<const double>(*eb);
    }
    records.push_back(ComputeMetrics(p, in));
  }
  return ComputeCrossDatasetStats(records);
}

}  // namespace mtcorpus
