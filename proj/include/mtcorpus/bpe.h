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

// Byte-level BPE: training, encode/decode, token budgets and sequence
// packing.
//
// Text is first cut into chunks of the form <whitespace*><non-whitespace*>
// (ASCII whitespace bytes); merges never cross a chunk or document boundary.
// Base ids 0..255 are the raw bytes, so every input is encodable. [PAD] and
// [SEP] are appended after the learned vocabulary.

#ifndef MTCORPUS_BPE_H_
#define MTCORPUS_BPE_H_

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include "mtcorpus/corpus.h"

namespace mtcorpus {

using TokenId = std::int32_t;

inline constexpr std::size_t kDefaultVocabSize = 50257;
inline constexpr std::size_t kDefaultContextLength = 1024;

// Cuts `text` into pretokenization chunks. Concatenation restores the text.
std::vector<std::string_view> PretokenizeChunks(std::string_view text);

class BpeModel {
 public:
  // A model with no merges: 256 byte tokens plus the two specials.
  BpeModel();

  // Rebuilds a model by replaying merges given as token byte strings.
  static BpeModel FromMerges(
      const std::vector<std::pair<std::string, std::string>> &merges);

  std::vector<TokenId> Encode(std::string_view text) const;
  void EncodeChunk(std::string_view chunk, std::vector<TokenId> &out) const;

  // Specials decode to their names "[PAD]" / "[SEP]". Throws Error on an id
  // outside [0, size()).
  std::string Decode(std::span<const TokenId> ids) const;

  TokenId pad_id() const { return pad_id_; }
  TokenId sep_id() const { return sep_id_; }
  bool IsSpecial(TokenId id) const { return id == pad_id_ || id == sep_id_; }

  // Learned vocabulary (bytes + merged tokens), excluding specials.
  std::size_t base_size() const { return tokens_.size(); }
  // Including specials.
  std::size_t size() const { return tokens_.size() + 2; }

  const std::string &token_bytes(TokenId id) const { return tokens_.at(id); }
  const std::vector<std::pair<TokenId, TokenId>> &merges() const {
    return merges_;
  }

  // Serialization: merges file (header + one "<left> <right>" per line, in
  // rank order) and vocab JSON (token -> id), both using the GPT-2 printable
  // byte alphabet.
  std::string MergesText() const;
  std::string VocabJson() const;
  void Save(const std::string &dir) const;
  static BpeModel Load(const std::string &dir);
  static BpeModel Parse(std::string_view merges_text);

 private:
  friend class BpeTrainer;

  // Appends a merge; reuses the id when the merged bytes already exist.
  TokenId AddMerge(TokenId left, TokenId right);
  void FinalizeSpecials();

  std::vector<std::string> tokens_;
  std::unordered_map<std::string, TokenId> token_ids_;
  std::vector<std::pair<TokenId, TokenId>> merges_;
  // (left << 32 | right) -> (rank, merged id)
  std::unordered_map<std::uint64_t, std::pair<std::int32_t, TokenId>> ranks_;
  TokenId pad_id_ = 0;
  TokenId sep_id_ = 0;
};

struct BpeTrainOptions {
  // Target learned vocabulary: 256 byte tokens + merged tokens. Training
  // stops early when no adjacent pair remains.
  std::size_t vocab_size = kDefaultVocabSize;
};

// Streaming trainer: feed documents, then Train(). Most frequent adjacent
// pair wins; ties go to the lexicographically smaller (left bytes, right
// bytes) pair.
class BpeTrainer {
 public:
  void AddText(std::string_view text);
  BpeModel Train(const BpeTrainOptions &options) const;

 private:
  std::unordered_map<std::string, std::uint64_t> chunk_counts_;
};

BpeModel TrainBpe(std::span<const Document> docs,
                  const BpeTrainOptions &options = {});
BpeModel TrainBpe(CorpusReader &reader, const BpeTrainOptions &options = {});

// Total encoded tokens over the corpus, specials excluded.
std::uint64_t CountTokens(CorpusReader &reader, const BpeModel &model);
std::uint64_t CountTokens(std::span<const Document> docs,
                          const BpeModel &model);

struct TokenBudget {
  std::string setup;
  std::uint64_t mt_tokens = 0;
  std::uint64_t native_tokens = 0;
};

std::string BudgetCsvHeader();
std::string ToCsvRow(const TokenBudget &b);

// Concatenates documents with [PAD] as end-of-document marker and cuts the
// stream into rows of exactly `context` ids; the final row is right-padded.
class SequencePacker {
 public:
  using RowSink = std::function<void(std::span<const TokenId>)>;

  SequencePacker(TokenId pad_id, std::size_t context, RowSink sink);

  void AddDocument(std::span<const TokenId> ids);
  void Finish();

  std::size_t rows_emitted() const { return rows_; }

 private:
  void Push(TokenId id);

  TokenId pad_;
  std::size_t context_;
  RowSink sink_;
  std::vector<TokenId> row_;
  std::size_t rows_ = 0;
};

std::vector<std::vector<TokenId>> PackSequences(
    std::span<const std::vector<TokenId>> docs, TokenId pad_id,
    std::size_t context = kDefaultContextLength);

// GPT-2 byte <-> printable code point mapping used in the vocab files.
std::string BytesToPrintable(std::string_view bytes);
std::string PrintableToBytes(std::string_view printable);

}  // namespace mtcorpus

#endif  // MTCORPUS_BPE_H_
