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

// Corpus statistics for comparing a natural corpus with its simplified
// counterpart: per-dataset lexical statistics and per-pair metrics
// (readability, compression, sentence splits, dependency depth, lexical and
// semantic overlap).
//
// The word unit everywhere is WordTokenize(): split on Unicode whitespace,
// lowercase, strip leading/trailing punctuation, drop tokens left empty.

#ifndef MTCORPUS_METRICS_H_
#define MTCORPUS_METRICS_H_

#include <cstddef>
#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "json.hpp"
#include "mtcorpus/corpus.h"

namespace mtcorpus {

std::vector<std::string> WordTokenize(std::string_view text);

// Same as WordTokenize(text).size() without materializing tokens.
std::size_t CountWords(std::string_view text);

struct PerDatasetStats {
  std::uint64_t total_words = 0;
  std::uint64_t types = 0;
  double ttr = 0.0;              // percent
  double unigram_entropy = 0.0;  // bits
};

nlohmann::json ToJson(const PerDatasetStats &s);

// 100 * types / total_words.
double TypeTokenRatio(std::uint64_t types, std::uint64_t total_words);

// Shannon entropy in bits of the relative frequencies; zero counts are
// ignored. Throws Error when every count is zero.
double UnigramEntropy(std::span<const std::uint64_t> counts);
double UnigramEntropy(const std::map<std::string, std::uint64_t> &freq);

// Streaming word-frequency accumulator. Partial counters merge associatively.
class WordCounter {
 public:
  void AddText(std::string_view text);
  void AddWord(std::string_view word, std::uint64_t count = 1);
  void Merge(const WordCounter &other);

  std::uint64_t total_words() const { return total_; }
  std::size_t types() const { return freq_.size(); }
  const std::unordered_map<std::string, std::uint64_t> &table() const {
    return freq_;
  }

  // Throws Error("no tokens") on an empty table.
  PerDatasetStats Stats() const;

 private:
  std::unordered_map<std::string, std::uint64_t> freq_;
  std::uint64_t total_ = 0;
};

PerDatasetStats ComputePerDatasetStats(CorpusReader &reader);
PerDatasetStats ComputePerDatasetStats(std::span<const Document> docs);

// Vowel-group heuristic: maximal runs of a/e/i/o/u/y, minus one for a
// trailing 'e' when there is more than one run, never below 1.
int CountSyllables(std::string_view word);

// Unclipped Flesch Reading Ease. Throws Error when the text has no words.
double FleschReadingEase(std::string_view text);

// Clamps to [0, 100]. Throws Error on NaN.
double ClipFre(double raw);

// words(simplified) / words(natural). Throws Error on a wordless natural side.
double CompressionLevel(std::string_view natural, std::string_view simplified);

// sentences(simplified) - sentences(natural).
std::int64_t SentenceSplitDifference(std::string_view natural,
                                     std::string_view simplified);

struct ParsedSentence {
  std::vector<std::string> tokens;
  std::vector<int> heads;  // 0-based parent index, -1 for the root
};

// Checks the single-root / in-range / acyclic constraints; throws Error.
void ValidateTree(const ParsedSentence &s);

// Number of nodes on the longest root-to-leaf path.
int DependencyTreeDepth(const ParsedSentence &s);

// max depth(simplified) / max depth(natural); nullopt when either side has
// no parsed sentence.
std::optional<double> DepthRatio(std::span<const ParsedSentence> natural,
                                 std::span<const ParsedSentence> simplified);

// Bigram-multiset F1. Falls back to unigram F1 when either side has fewer
// than two tokens. Identical token sequences score 1.
double Rouge2(std::string_view candidate, std::string_view reference);
double Rouge2(std::span<const std::string> candidate,
              std::span<const std::string> reference);

// LCS-based F1 over word tokens.
double RougeL(std::string_view candidate, std::string_view reference);
double RougeL(std::span<const std::string> candidate,
              std::span<const std::string> reference);

std::size_t LcsLength(std::span<const std::string> a,
                      std::span<const std::string> b);

enum class OverlapBucket { kExactMatch, kHigh, kMedium, kLow, kExactMismatch };

OverlapBucket BucketOf(double rouge2);
std::string_view BucketName(OverlapBucket b);

double CosineSimilarity(std::span<const double> a, std::span<const double> b);

struct PairInputs {
  std::span<const ParsedSentence> natural_parses;
  std::span<const ParsedSentence> simplified_parses;
  std::optional<std::span<const double>> natural_embedding;
  std::optional<std::span<const double>> simplified_embedding;
};

// Computes the full metric vector for one natural/simplified pair (side_a is
// natural, side_b simplified). Lexical overlap compares simplified
// (candidate) against natural (reference).
MetricRecord ComputeMetrics(const ParallelPair &pair,
                            const PairInputs &inputs = {});

struct CrossDatasetStats {
  std::size_t pairs = 0;
  double pct_compression_lt_80 = 0.0;
  double pct_exact_match = 0.0;
  double pct_high = 0.0;
  double pct_medium = 0.0;
  double pct_low = 0.0;
  double pct_exact_mismatch = 0.0;
  std::optional<double> pct_sim_gt_80;
};

nlohmann::json ToJson(const CrossDatasetStats &s);
CrossDatasetStats CrossDatasetStatsFromJson(const nlohmann::json &j);

// Aggregates per-pair records. The similarity share is computed over records
// carrying a cosine and is absent when none do. Throws on an empty input.
CrossDatasetStats ComputeCrossDatasetStats(
    std::span<const MetricRecord> records);

using EmbeddingLookup =
    std::function<std::optional<std::vector<double>>(const std::string &id,
                                                     bool simplified_side)>;

CrossDatasetStats ComputeCrossDatasetStats(
    std::span<const ParallelPair> pairs,
    const EmbeddingLookup &embeddings = nullptr);

}  // namespace mtcorpus

#endif  // MTCORPUS_METRICS_H_
