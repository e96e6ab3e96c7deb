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

#include "mtcorpus/bpe.h"

#include <algorithm>
#include <array>
#include <filesystem>
#include <queue>

#include "json.hpp"
#include "mtcorpus/error.h"
#include "mtcorpus/utf8.h"

namespace mtcorpus {

namespace {

constexpr std::string_view kPadName = "[PAD]";
constexpr std::string_view kSepName = "[SEP]";
constexpr std::string_view kMergesHeader = "#version: mtcorpus-bpe 1";

std::uint64_t PairKey(TokenId a, TokenId b) {
  return (static_cast<std::uint64_t>(static_cast<std::uint32_t>(a)) << 32) |
         static_cast<std::uint32_t>(b);
}
TokenId KeyLeft(std::uint64_t k) { return static_cast<TokenId>(k >> 32); }
TokenId KeyRight(std::uint64_t k) {
  return static_cast<TokenId>(k & 0xFFFFFFFFu);
}

bool IsAsciiSpace(unsigned char c) {
  return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\v' ||
         c == '\f';
}

struct ByteAlphabet {
  std::array<char32_t, 256> to_cp{};
  std::unordered_map<char32_t, unsigned char> to_byte;

  ByteAlphabet() {
    int extra = 0;
    for (int b = 0; b < 256; ++b) {
      const bool printable = (b >= '!' && b <= '~') || (b >= 0xA1 && b <= 0xAC) ||
                             (b >= 0xAE && b <= 0xFF);
      to_cp[b] = printable ? static_cast<char32_t>(b)
                           : static_cast<char32_t>(256 + extra++);
      to_byte[to_cp[b]] = static_cast<unsigned char>(b);
    }
  }
};

const ByteAlphabet &Alphabet() {
  static const ByteAlphabet kAlphabet;
  return kAlphabet;
}

}  // namespace

std::vector<std::string_view> PretokenizeChunks(std::string_view text) {
  std::vector<std::string_view> chunks;
  std::size_t start = 0;
  for (std::size_t i = 1; i < text.size(); ++i) {
    const bool prev_space = IsAsciiSpace(static_cast<unsigned char>(text[i - 1]));
    const bool cur_space = IsAsciiSpace(static_cast<unsigned char>(text[i]));
    if (!prev_space && cur_space) {
      chunks.push_back(text.substr(start, i - start));
      start = i;
    }
  }
  if (start < text.size()) chunks.push_back(text.substr(start));
  return chunks;
}

std::string BytesToPrintable(std::string_view bytes) {
  std::string out;
  for (unsigned char b : bytes) utf8::Append(out, Alphabet().to_cp[b]);
  return out;
}

std::string PrintableToBytes(std::string_view printable) {
  std::string out;
  std::size_t pos = 0;
  while (pos < printable.size()) {
    const char32_t cp = utf8::Next(printable, pos);
    auto it = Alphabet().to_byte.find(cp);
    if (it == Alphabet().to_byte.end()) {
      throw Error("vocabulary token contains a code point outside the byte "
                  "alphabet");
    }
    out.push_back(static_cast<char>(it->second));
  }
  return out;
}

BpeModel::BpeModel() {
  tokens_.reserve(256);
  for (int b = 0; b < 256; ++b) {
    tokens_.emplace_back(1, static_cast<char>(b));
    token_ids_.emplace(tokens_.back(), b);
  }
  FinalizeSpecials();
}

void BpeModel::FinalizeSpecials() {
  pad_id_ = static_cast<TokenId>(tokens_.size());
  sep_id_ = pad_id_ + 1;
}

TokenId BpeModel::AddMerge(TokenId left, TokenId right) {
  std::string bytes = tokens_.at(left) + tokens_.at(right);
  TokenId id;
  if (auto it = token_ids_.find(bytes); it != token_ids_.end()) {
    id = it->second;
  } else {
    id = static_cast<TokenId>(tokens_.size());
    tokens_.push_back(bytes);
    token_ids_.emplace(std::move(bytes), id);
  }
  const auto rank = static_cast<std::int32_t>(merges_.size());
  merges_.emplace_back(left, right);
  ranks_.try_emplace(PairKey(left, right), rank, id);
  FinalizeSpecials();
  return id;
}

BpeModel BpeModel::FromMerges(
    const std::vector<std::pair<std::string, std::string>> &merges) {
  BpeModel model;
  for (const auto &[l, r] : merges) {
    auto li = model.token_ids_.find(l);
    auto ri = model.token_ids_.find(r);
    if (li == model.token_ids_.end() || ri == model.token_ids_.end()) {
      throw Error("merge refers to an unknown token");
    }
    model.AddMerge(li->second, ri->second);
  }
  return model;
}

void BpeModel::EncodeChunk(std::string_view chunk,
                           std::vector<TokenId> &out) const {
  std::vector<TokenId> syms;
  syms.reserve(chunk.size());
  for (unsigned char c : chunk) syms.push_back(c);
  while (syms.size() > 1) {
    std::int32_t best_rank = -1;
    TokenId best_left = 0, best_right = 0, best_id = 0;
    for (std::size_t i = 0; i + 1 < syms.size(); ++i) {
      auto it = ranks_.find(PairKey(syms[i], syms[i + 1]));
      if (it == ranks_.end()) continue;
      if (best_rank < 0 || it->second.first < best_rank) {
        best_rank = it->second.first;
        best_left = syms[i];
        best_right = syms[i + 1];
        best_id = it->second.second;
      }
    }
    if (best_rank < 0) break;
    std::size_t w = 0;
    for (std::size_t i = 0; i < syms.size();) {
      if (i + 1 < syms.size() && syms[i] == best_left &&
          syms[i + 1] == best_right) {
        syms[w++] = best_id;
        i += 2;
      } else {
        syms[w++] = syms[i++];
      }
    }
    syms.resize(w);
  }
  out.insert(out.end(), syms.begin(), syms.end());
}

std::vector<TokenId> BpeModel::Encode(std::string_view text) const {
  std::vector<TokenId> ids;
  for (auto chunk : PretokenizeChunks(text)) EncodeChunk(chunk, ids);
  return ids;
}

std::string BpeModel::Decode(std::span<const TokenId> ids) const {
  std::string out;
  for (TokenId id : ids) {
    if (id == pad_id_) {
      out += kPadName;
    } else if (id == sep_id_) {
      out += kSepName;
    } else if (id >= 0 && static_cast<std::size_t>(id) < tokens_.size()) {
      out += tokens_[id];
    } else {
      throw Error("token id out of range: " + std::to_string(id));
    }
  }
  return out;
}

std::string BpeModel::MergesText() const {
  std::string out(kMergesHeader);
  out += '\n';
  for (const auto &[l, r] : merges_) {
    out += BytesToPrintable(tokens_[l]);
    out += ' ';
    out += BytesToPrintable(tokens_[r]);
    out += '\n';
  }
  return out;
}

std::string BpeModel::VocabJson() const {
  nlohmann::ordered_json j = nlohmann::ordered_json::object();
  for (std::size_t id = 0; id < tokens_.size(); ++id) {
    j[BytesToPrintable(tokens_[id])] = id;
  }
  j[std::string(kPadName)] = pad_id_;
  j[std::string(kSepName)] = sep_id_;
  return j.dump(1) + "\n";
}

void BpeModel::Save(const std::string &dir) const {
  std::filesystem::create_directories(dir);
  WriteFile(dir + "/merges.txt", MergesText());
  WriteFile(dir + "/vocab.json", VocabJson());
}

BpeModel BpeModel::Parse(std::string_view merges_text) {
  std::vector<std::pair<std::string, std::string>> merges;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos < merges_text.size()) {
    std::size_t eol = merges_text.find('\n', pos);
    if (eol == std::string_view::npos) eol = merges_text.size();
    std::string_view line = merges_text.substr(pos, eol - pos);
    pos = eol + 1;
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (line.empty() || line.starts_with("#version")) continue;
    const std::size_t space = line.find(' ');
    if (space == std::string_view::npos ||
        line.find(' ', space + 1) != std::string_view::npos) {
      throw ParseError("merges: expected \"<left> <right>\"", line_no);
    }
    merges.emplace_back(PrintableToBytes(line.substr(0, space)),
                        PrintableToBytes(line.substr(space + 1)));
  }
  return FromMerges(merges);
}

BpeModel BpeModel::Load(const std::string &dir) {
  BpeModel model = Parse(ReadFile(dir + "/merges.txt"));
  const std::string vocab_path = dir + "/vocab.json";
  if (std::filesystem::exists(vocab_path)) {
    const auto vocab = nlohmann::json::parse(ReadFile(vocab_path));
    for (const auto &[tok, id] : vocab.items()) {
      const auto expect = id.get<TokenId>();
      if (tok == kPadName || tok == kSepName) continue;
      auto it = model.token_ids_.find(PrintableToBytes(tok));
      if (it == model.token_ids_.end() || it->second != expect) {
        throw Error(vocab_path + ": vocabulary disagrees with merges");
      }
    }
    if (vocab.value(std::string(kPadName), -1) != model.pad_id_ ||
        vocab.value(std::string(kSepName), -1) != model.sep_id_) {
      throw Error(vocab_path + ": special token ids disagree with merges");
    }
  }
  return model;
}

void BpeTrainer::AddText(std::string_view text) {
  for (auto chunk : PretokenizeChunks(text)) ++chunk_counts_[std::string(chunk)];
}

BpeModel BpeTrainer::Train(const BpeTrainOptions &options) const {
  if (options.vocab_size < 257) {
    throw Error("vocab_size must be at least 257, got " +
                std::to_string(options.vocab_size));
  }
  BpeModel model;

  std::vector<const std::pair<const std::string, std::uint64_t> *> sorted;
  sorted.reserve(chunk_counts_.size());
  for (const auto &entry : chunk_counts_) sorted.push_back(&entry);
  std::sort(sorted.begin(), sorted.end(),
            [](auto *a, auto *b) { return a->first < b->first; });

  std::vector<std::vector<TokenId>> words;
  std::vector<std::int64_t> freq;
  words.reserve(sorted.size());
  freq.reserve(sorted.size());
  std::unordered_map<std::uint64_t, std::int64_t> pair_counts;
  std::unordered_map<std::uint64_t, std::vector<std::uint32_t>> where;
  for (auto *entry : sorted) {
    if (entry->first.size() < 2) continue;
    const auto w = static_cast<std::uint32_t>(words.size());
    auto &syms = words.emplace_back();
    for (unsigned char c : entry->first) syms.push_back(c);
    freq.push_back(static_cast<std::int64_t>(entry->second));
    for (std::size_t i = 0; i + 1 < syms.size(); ++i) {
      const auto key = PairKey(syms[i], syms[i + 1]);
      pair_counts[key] += freq.back();
      auto &list = where[key];
      if (list.empty() || list.back() != w) list.push_back(w);
    }
  }

  struct Entry {
    std::int64_t count;
    std::uint64_t key;
  };
  const auto &tokens = model.tokens_;
  // Lower priority first: smaller count, then lexicographically larger pair.
  auto lower = [&tokens](const Entry &a, const Entry &b) {
    if (a.count != b.count) return a.count < b.count;
    const std::string &al = tokens[KeyLeft(a.key)];
    const std::string &bl = tokens[KeyLeft(b.key)];
    if (al != bl) return bl < al;
    return tokens[KeyRight(b.key)] < tokens[KeyRight(a.key)];
  };
  std::priority_queue<Entry, std::vector<Entry>, decltype(lower)> heap(lower);
  for (const auto &[key, count] : pair_counts) heap.push({count, key});

  std::vector<std::uint32_t> seen(words.size(), 0);
  std::uint32_t stamp = 0;
  std::unordered_map<std::uint64_t, std::int64_t> delta;
  std::vector<TokenId> merged;

  while (model.base_size() < options.vocab_size && !heap.empty()) {
    const Entry top = heap.top();
    heap.pop();
    auto pc = pair_counts.find(top.key);
    if (pc == pair_counts.end() || pc->second != top.count || top.count <= 0) {
      continue;
    }
    const TokenId left = KeyLeft(top.key);
    const TokenId right = KeyRight(top.key);
    const TokenId id = model.AddMerge(left, right);

    ++stamp;
    delta.clear();
    std::vector<std::uint32_t> affected = std::move(where[top.key]);
    where.erase(top.key);
    for (std::uint32_t w : affected) {
      if (seen[w] == stamp) continue;
      seen[w] = stamp;
      auto &syms = words[w];
      merged.clear();
      bool changed = false;
      for (std::size_t i = 0; i < syms.size();) {
        if (i + 1 < syms.size() && syms[i] == left && syms[i + 1] == right) {
          merged.push_back(id);
          i += 2;
          changed = true;
        } else {
          merged.push_back(syms[i++]);
        }
      }
      if (!changed) continue;
      const std::int64_t f = freq[w];
      for (std::size_t i = 0; i + 1 < syms.size(); ++i) {
        delta[PairKey(syms[i], syms[i + 1])] -= f;
      }
      for (std::size_t i = 0; i + 1 < merged.size(); ++i) {
        const auto key = PairKey(merged[i], merged[i + 1]);
        delta[key] += f;
        if (merged[i] == id || merged[i + 1] == id) {
          auto &list = where[key];
          if (list.empty() || list.back() != w) list.push_back(w);
        }
      }
      syms.swap(merged);
    }
    for (const auto &[key, d] : delta) {
      if (d == 0) continue;
      auto &count = pair_counts[key];
      count += d;
      if (count > 0) {
        heap.push({count, key});
      } else {
        pair_counts.erase(key);
      }
    }
  }
  return model;
}

BpeModel TrainBpe(std::span<const Document> docs,
                  const BpeTrainOptions &options) {
  BpeTrainer trainer;
  for (const auto &d : docs) trainer.AddText(d.text);
  return trainer.Train(options);
}

BpeModel TrainBpe(CorpusReader &reader, const BpeTrainOptions &options) {
  BpeTrainer trainer;
  while (auto doc = reader.Next()) trainer.AddText(doc->text);
  return trainer.Train(options);
}

namespace {

class TokenCounter {
 public:
  explicit TokenCounter(const BpeModel &model) : model_(model) {}

  std::uint64_t Count(std::string_view text) {
    std::uint64_t n = 0;
    for (auto chunk : PretokenizeChunks(text)) {
      auto it = cache_.find(std::string(chunk));
      if (it == cache_.end()) {
        scratch_.clear();
        model_.EncodeChunk(chunk, scratch_);
        if (cache_.size() > (1u << 21)) cache_.clear();
        it = cache_.emplace(std::string(chunk), scratch_.size()).first;
      }
      n += it->second;
    }
    return n;
  }

 private:
  const BpeModel &model_;
  std::unordered_map<std::string, std::uint32_t> cache_;
  std::vector<TokenId> scratch_;
};

}  // namespace

std::uint64_t CountTokens(CorpusReader &reader, const BpeModel &model) {
  TokenCounter counter(model);
  std::uint64_t total = 0;
  while (auto doc = reader.Next()) total += counter.Count(doc->text);
  return total;
}

std::uint64_t CountTokens(std::span<const Document> docs,
                          const BpeModel &model) {
  TokenCounter counter(model);
  std::uint64_t total = 0;
  for (const auto &d : docs) total += counter.Count(d.text);
  return total;
}

std::string BudgetCsvHeader() { return "setup,mt_tokens,native_tokens"; }

std::string ToCsvRow(const TokenBudget &b) {
  return b.setup + "," + std::to_string(b.mt_tokens) + "," +
         std::to_string(b.native_tokens);
}

SequencePacker::SequencePacker(TokenId pad_id, std::size_t context,
                               RowSink sink)
    : pad_(pad_id), context_(context), sink_(std::move(sink)) {
  if (context_ == 0) throw Error("context length must be positive");
  row_.reserve(context_);
}

void SequencePacker::Push(TokenId id) {
  row_.push_back(id);
  if (row_.size() == context_) {
    sink_(row_);
    ++rows_;
    row_.clear();
  }
}

void SequencePacker::AddDocument(std::span<const TokenId> ids) {
  for (TokenId id : ids) Push(id);
  Push(pad_);
}

void SequencePacker::Finish() {
  if (row_.empty()) return;
  row_.resize(context_, pad_);
  sink_(row_);
  ++rows_;
  row_.clear();
}

std::vector<std::vector<TokenId>> PackSequences(
    std::span<const std::vector<TokenId>> docs, TokenId pad_id,
    std::size_t context) {
  std::vector<std::vector<TokenId>> rows;
  SequencePacker packer(pad_id, context, [&](std::span<const TokenId> row) {
    rows.emplace_back(row.begin(), row.end());
  });
  for (const auto &d : docs) packer.AddDocument(d);
  packer.Finish();
  return rows;
}

}  // namespace mtcorpus
