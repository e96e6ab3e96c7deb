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

// Sentence segmentation and the filters applied around sentence-level MT:
// length bounds before translation, a target/source length-ratio cap after
// it, reassembly of translated sentences into documents, and the constraint
// that natural and simplified corpora stay parallel.

#ifndef MTCORPUS_FILTERS_H_
#define MTCORPUS_FILTERS_H_

#include <cstddef>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"
#include "mtcorpus/corpus.h"

namespace mtcorpus {

// Rule-based segmenter. A boundary follows '.', '!', '?' or the danda (plus
// any closing quotes/brackets) when the next non-space character, after
// optional opening quotes, is uppercase, a digit, or a letter of a caseless
// script. A period after a word in the abbreviation list never ends a
// sentence. Spans exclude surrounding whitespace, so the gaps between
// consecutive spans (and before the first / after the last) are whitespace.
std::vector<SentenceSpan> SegmentSentences(const Document &doc);
std::vector<std::string_view> SplitSentences(std::string_view text);

// Lowercased abbreviations (without the trailing period) that suppress a
// sentence boundary.
const std::vector<std::string> &AbbreviationList();

struct LengthBounds {
  std::size_t min_tokens = 3;
  std::size_t max_tokens = 250;

  void Validate() const;
};

// Per-language defaults: "id" -> [3, 250], "ta" -> [4, 150].
LengthBounds ProfileBounds(std::string_view profile);

struct SentencePairRatio {
  std::string doc_id;
  std::size_t index = 0;
  std::size_t source_tokens = 0;
  std::size_t target_tokens = 0;
  double ratio = 0.0;
};

struct FilterReport {
  std::size_t kept = 0;
  std::size_t dropped = 0;
  std::map<std::string, std::size_t> reasons;
  std::vector<std::string> dropped_ids;

  void Merge(const FilterReport &other);
};

nlohmann::json ToJson(const FilterReport &r);

struct PreFilterResult {
  std::vector<Document> kept;
  FilterReport report;
};

// Drops every document with at least one sentence whose word count lies
// outside [min_tokens, max_tokens] (inclusive bounds). Reasons: "too_short",
// "too_long" (first offending sentence decides).
PreFilterResult PreMtFilter(std::span<const Document> docs,
                            const LengthBounds &bounds);

// The unit exchanged with the translation client.
struct SentenceRecord {
  std::string doc_id;
  std::size_t index = 0;
  std::string text;

  bool operator==(const SentenceRecord &) const = default;
};

nlohmann::json ToJson(const SentenceRecord &s);
SentenceRecord SentenceRecordFromJson(const nlohmann::json &j,
                                      std::size_t line_no = 0);
std::vector<SentenceRecord> ReadSentences(const std::string &path);
void WriteSentences(const std::string &path,
                    std::span<const SentenceRecord> records);

// Splits documents into sentence records, in document order.
std::vector<SentenceRecord> ToSentenceRecords(std::span<const Document> docs);

struct PostFilterResult {
  std::vector<SentenceRecord> kept_source;
  std::vector<SentenceRecord> kept_target;
  std::vector<SentencePairRatio> ratios;
  FilterReport report;
};

// Drops every document containing a sentence pair with
// target_tokens / source_tokens > max_ratio (strict). Every (doc_id, index)
// must appear on both sides; otherwise Error names the first unaligned one.
PostFilterResult PostMtFilter(std::span<const SentenceRecord> source,
                              std::span<const SentenceRecord> target,
                              double max_ratio = 2.0);

// Joins each document's sentences in index order with single spaces. Output
// is ordered by doc_id unless `order` lists the ids to follow (ids missing
// from `order` come after, sorted). Throws "doc X missing sentence k" on gaps.
std::vector<Document> ReconstructDocuments(
    std::span<const SentenceRecord> records,
    std::span<const std::string> order = {});

struct ParallelReport {
  std::vector<std::string> dropped_natural;
  std::vector<std::string> dropped_simplified;
};

struct ParallelCorpora {
  std::vector<Document> natural;
  std::vector<Document> simplified;
  ParallelReport report;
};

// Restricts both corpora to their shared ids. Both outputs follow the
// natural corpus order.
ParallelCorpora EnforceParallelism(std::span<const Document> natural,
                                   std::span<const Document> simplified);

}  // namespace mtcorpus

#endif  // MTCORPUS_FILTERS_H_
