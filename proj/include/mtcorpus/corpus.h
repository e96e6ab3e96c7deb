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

// Data model shared by every stage of the pipeline, plus streaming corpus I/O.
//
// The canonical on-disk corpus format is JSONL, one object per line:
//   {"id": "<doc id>", "text": "<utf-8 text>", "meta": {"k": "v", ...}}
// A plain-text format (one document per line) is also accepted; its ids are
// synthesized as "line-<n>" with n the 1-based line number.

#ifndef MTCORPUS_CORPUS_H_
#define MTCORPUS_CORPUS_H_

#include <cstddef>
#include <cstdint>
#include <fstream>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

namespace mtcorpus {

using Meta = std::map<std::string, std::string>;

struct Document {
  std::string doc_id;
  std::string text;
  Meta meta;

  bool operator==(const Document &) const = default;
};

// Byte range [start, end) of one sentence inside Document::text.
struct SentenceSpan {
  std::string doc_id;
  std::size_t index = 0;
  std::size_t start = 0;
  std::size_t end = 0;

  std::string_view View(std::string_view text) const {
    return text.substr(start, end - start);
  }
  bool operator==(const SentenceSpan &) const = default;
};

enum class Relation { kNaturalSimplified, kSourceTranslation };

struct ParallelPair {
  std::string pair_id;
  Document side_a;
  Document side_b;
  Relation relation = Relation::kNaturalSimplified;
};

// Per-pair metric vector. FRE values are stored raw; clipping to [0, 100] is
// applied by the outlier policy.
struct MetricRecord {
  std::string pair_id;
  double fre_a = 0.0;
  double fre_b = 0.0;
  double compression = 0.0;
  std::int64_t split_diff = 0;
  std::optional<double> depth_ratio;
  double rouge2 = 0.0;
  double rougeL = 0.0;
  std::optional<double> cosine;
  std::set<std::string> outlier_flags;

  bool operator==(const MetricRecord &) const = default;
};

nlohmann::json ToJson(const MetricRecord &r);
MetricRecord MetricRecordFromJson(const nlohmann::json &j);

// CSV layout: one header line then one row per record. Absent optionals are
// empty cells; outlier flags are joined with ';'.
std::string MetricCsvHeader();
std::string ToCsvRow(const MetricRecord &r);

struct CorpusManifest {
  std::string name;
  std::uint64_t document_count = 0;
  std::vector<std::string> vocabularies;
  std::map<std::string, std::uint64_t> token_counts;
  std::string provenance;

  // Throws Error when a declared vocabulary has no token count.
  void Validate() const;
};

nlohmann::json ToJson(const CorpusManifest &m);
CorpusManifest ManifestFromJson(const nlohmann::json &j);

enum class CorpusFormat { kJsonl, kPlainText };

CorpusFormat ParseCorpusFormat(std::string_view name);

// Parses one JSONL corpus line. `line_no` is only used for diagnostics and
// `base_offset` is the file offset of the line start, used for UTF-8 errors.
Document ParseJsonlDocument(std::string_view line, std::size_t line_no,
                            std::size_t base_offset = 0);
std::string ToJsonlLine(const Document &doc);

// Single-pass reader. Memory use is bounded by the longest line. A path of
// "-" reads standard input.
class CorpusReader {
 public:
  CorpusReader(const std::string &path, CorpusFormat format);
  CorpusReader(std::istream &in, CorpusFormat format);

  std::optional<Document> Next();
  std::size_t line_number() const { return line_no_; }

 private:
  std::unique_ptr<std::ifstream> owned_;
  std::istream *in_;
  CorpusFormat format_;
  std::string path_;
  std::size_t line_no_ = 0;
  std::size_t offset_ = 0;
  std::string line_;
};

// Writes documents in order. "-" writes standard output. Plain-text output
// stores only the text; texts containing line breaks are rejected.
class CorpusWriter {
 public:
  CorpusWriter(const std::string &path, CorpusFormat format);
  CorpusWriter(std::ostream &out, CorpusFormat format);
  ~CorpusWriter();

  void Write(const Document &doc);
  void Close();

 private:
  std::unique_ptr<std::ofstream> owned_;
  std::ostream *out_;
  CorpusFormat format_;
  std::string path_;
};

std::vector<Document> ReadCorpus(const std::string &path, CorpusFormat format);
void ReadCorpus(const std::string &path, CorpusFormat format,
                const std::function<void(Document &&)> &sink);
void WriteCorpus(std::span<const Document> docs, const std::string &path,
                 CorpusFormat format);

struct JoinResult {
  std::vector<ParallelPair> pairs;
  std::vector<std::string> unmatched_a;
  std::vector<std::string> unmatched_b;
};

// Pairs documents by shared doc_id, in side_a order. Duplicate ids within
// either input throw Error("duplicate doc_id <id>").
JoinResult JoinParallel(std::span<const Document> a,
                        std::span<const Document> b,
                        Relation relation = Relation::kNaturalSimplified);

// Throws Error naming the first repeated id.
void CheckUniqueIds(std::span<const Document> docs);

// Generic line-oriented JSON helpers used by the other file formats.
std::vector<nlohmann::json> ReadJsonLines(const std::string &path);
void WriteJsonLines(const std::string &path,
                    std::span<const nlohmann::json> rows);
std::string ReadFile(const std::string &path);
void WriteFile(const std::string &path, std::string_view content);

}  // namespace mtcorpus

#endif  // MTCORPUS_CORPUS_H_
