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

#include "mtcorpus/corpus.h"

#include <cmath>
#include <cstdio>
#include <iostream>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

#include "mtcorpus/error.h"
#include "mtcorpus/utf8.h"

namespace mtcorpus {

using nlohmann::json;

namespace {

std::string ScalarToString(const json &v) {
  if (v.is_string()) return v.get<std::string>();
  return v.dump();
}

std::string FormatDouble(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.10g", v);
  return buf;
}

std::string CsvQuote(const std::string &s) {
  if (s.find_first_of(",\"\n\r") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

void StripCr(std::string &line) {
  if (!line.empty() && line.back() == '\r') line.pop_back();
}

}  // namespace

json ToJson(const MetricRecord &r) {
  json j = {{"pair_id", r.pair_id},         {"fre_a", r.fre_a},
            {"fre_b", r.fre_b},             {"compression", r.compression},
            {"split_diff", r.split_diff},   {"rouge2", r.rouge2},
            {"rougeL", r.rougeL}};
  j["depth_ratio"] = r.depth_ratio ? json(*r.depth_ratio) : json(nullptr);
  j["cosine"] = r.cosine ? json(*r.cosine) : json(nullptr);
  j["outlier_flags"] = json::array();
  for (const auto &f : r.outlier_flags) j["outlier_flags"].push_back(f);
  return j;
}

MetricRecord MetricRecordFromJson(const json &j) {
  MetricRecord r;
  try {
    r.pair_id = ScalarToString(j.at("pair_id"));
    r.fre_a = j.at("fre_a").get<double>();
    r.fre_b = j.at("fre_b").get<double>();
    r.compression = j.at("compression").get<double>();
    r.split_diff = j.at("split_diff").get<std::int64_t>();
    r.rouge2 = j.at("rouge2").get<double>();
    r.rougeL = j.at("rougeL").get<double>();
    if (j.contains("depth_ratio") && !j["depth_ratio"].is_null()) {
      r.depth_ratio = j["depth_ratio"].get<double>();
    }
    if (j.contains("cosine") && !j["cosine"].is_null()) {
      r.cosine = j["cosine"].get<double>();
    }
    if (j.contains("outlier_flags")) {
      for (const auto &f : j["outlier_flags"]) {
        r.outlier_flags.insert(f.get<std::string>());
      }
    }
  } catch (const json::exception &e) {
    throw Error(std::string("bad metric record: ") + e.what());
  }
  return r;
}

std::string MetricCsvHeader() {
  return "pair_id,fre_a,fre_b,compression,split_diff,depth_ratio,rouge2,"
         "rougeL,cosine,outlier_flags";
}

std::string ToCsvRow(const MetricRecord &r) {
  std::string flags;
  for (const auto &f : r.outlier_flags) {
    if (!flags.empty()) flags += ';';
    flags += f;
  }
  std::string row = CsvQuote(r.pair_id);
  row += ',' + FormatDouble(r.fre_a);
  row += ',' + FormatDouble(r.fre_b);
  row += ',' + FormatDouble(r.compression);
  row += ',' + std::to_string(r.split_diff);
  row += ',' + (r.depth_ratio ? FormatDouble(*r.depth_ratio) : "");
  row += ',' + FormatDouble(r.rouge2);
  row += ',' + FormatDouble(r.rougeL);
  row += ',' + (r.cosine ? FormatDouble(*r.cosine) : "");
  row += ',' + CsvQuote(flags);
  return row;
}

void CorpusManifest::Validate() const {
  for (const auto &v : vocabularies) {
    if (!token_counts.contains(v)) {
      throw Error("manifest " + name + ": no token count for vocabulary " + v);
    }
  }
}

json ToJson(const CorpusManifest &m) {
  return {{"name", m.name},
          {"document_count", m.document_count},
          {"vocabularies", m.vocabularies},
          {"token_counts", m.token_counts},
          {"provenance", m.provenance}};
}

CorpusManifest ManifestFromJson(const json &j) {
  CorpusManifest m;
  m.name = j.at("name").get<std::string>();
  m.document_count = j.at("document_count").get<std::uint64_t>();
  m.vocabularies = j.value("vocabularies", std::vector<std::string>{});
  m.token_counts =
      j.value("token_counts", std::map<std::string, std::uint64_t>{});
  m.provenance = j.value("provenance", std::string());
  m.Validate();
  return m;
}

CorpusFormat ParseCorpusFormat(std::string_view name) {
  if (name == "jsonl") return CorpusFormat::kJsonl;
  if (name == "text" || name == "txt" || name == "plain") {
    return CorpusFormat::kPlainText;
  }
  throw Error("unknown corpus format: " + std::string(name));
}

Document ParseJsonlDocument(std::string_view line, std::size_t line_no,
                            std::size_t base_offset) {
  if (auto bad = utf8::FindInvalid(line)) {
    throw Utf8Error("line " + std::to_string(line_no) + ": invalid UTF-8",
                    base_offset + *bad);
  }
  json j;
  try {
    j = json::parse(line);
  } catch (const json::parse_error &e) {
    throw ParseError(std::string("malformed JSON: ") + e.what(), line_no);
  }
  if (!j.is_object()) throw ParseError("record is not an object", line_no);
  Document doc;
  auto id = j.find("id");
  if (id == j.end() || !(id->is_string() || id->is_number_integer())) {
    throw ParseError("missing \"id\" field", line_no);
  }
  doc.doc_id = ScalarToString(*id);
  if (doc.doc_id.empty()) throw ParseError("empty \"id\"", line_no);
  auto text = j.find("text");
  if (text == j.end() || !text->is_string()) {
    throw ParseError("missing \"text\" field", line_no);
  }
  doc.text = text->get<std::string>();
  if (auto meta = j.find("meta"); meta != j.end() && !meta->is_null()) {
    if (!meta->is_object()) throw ParseError("\"meta\" is not an object", line_no);
    for (const auto &[k, v] : meta->items()) doc.meta[k] = ScalarToString(v);
  }
  return doc;
}

std::string ToJsonlLine(const Document &doc) {
  json j = {{"id", doc.doc_id}, {"text", doc.text}};
  j["meta"] = json::object();
  for (const auto &[k, v] : doc.meta) j["meta"][k] = v;
  return j.dump();
}

CorpusReader::CorpusReader(const std::string &path, CorpusFormat format)
    : format_(format), path_(path) {
  if (path == "-") {
    in_ = &std::cin;
    return;
  }
  owned_ = std::make_unique<std::ifstream>(path, std::ios::binary);
  if (!*owned_) throw IoError("cannot open " + path);
  in_ = owned_.get();
}

CorpusReader::CorpusReader(std::istream &in, CorpusFormat format)
    : in_(&in), format_(format), path_("<stream>") {}

std::optional<Document> CorpusReader::Next() {
  while (std::getline(*in_, line_)) {
    ++line_no_;
    const std::size_t line_offset = offset_;
    offset_ += line_.size() + 1;
    StripCr(line_);
    if (format_ == CorpusFormat::kPlainText) {
      if (auto bad = utf8::FindInvalid(line_)) {
        throw Utf8Error(path_ + ": line " + std::to_string(line_no_) +
                            ": invalid UTF-8",
                        line_offset + *bad);
      }
      return Document{"line-" + std::to_string(line_no_), line_, {}};
    }
    if (line_.find_first_not_of(" \t") == std::string::npos) continue;
    return ParseJsonlDocument(line_, line_no_, line_offset);
  }
  if (in_->bad()) throw IoError("read failure on " + path_);
  return std::nullopt;
}

CorpusWriter::CorpusWriter(const std::string &path, CorpusFormat format)
    : format_(format), path_(path) {
  if (path == "-") {
    out_ = &std::cout;
    return;
  }
  owned_ = std::make_unique<std::ofstream>(path, std::ios::binary);
  if (!*owned_) throw IoError("cannot open " + path + " for writing");
  out_ = owned_.get();
}

CorpusWriter::CorpusWriter(std::ostream &out, CorpusFormat format)
    : out_(&out), format_(format), path_("<stream>") {}

CorpusWriter::~CorpusWriter() {
  if (out_) out_->flush();
}

void CorpusWriter::Write(const Document &doc) {
  if (format_ == CorpusFormat::kJsonl) {
    *out_ << ToJsonlLine(doc) << '\n';
  } else {
    if (doc.text.find_first_of("\r\n") != std::string::npos) {
      throw IoError(path_ + ": document " + doc.doc_id +
                    " contains a line break; use jsonl");
    }
    *out_ << doc.text << '\n';
  }
  if (!*out_) throw IoError("write failure on " + path_);
}

void CorpusWriter::Close() {
  out_->flush();
  if (!*out_) throw IoError("write failure on " + path_);
  if (owned_) owned_->close();
  out_ = nullptr;
}

std::vector<Document> ReadCorpus(const std::string &path, CorpusFormat format) {
  std::vector<Document> docs;
  ReadCorpus(path, format, [&](Document &&d) { docs.push_back(std::move(d)); });
  return docs;
}

void ReadCorpus(const std::string &path, CorpusFormat format,
                const std::function<void(Document &&)> &sink) {
  CorpusReader reader(path, format);
  while (auto doc = reader.Next()) sink(std::move(*doc));
}

void WriteCorpus(std::span<const Document> docs, const std::string &path,
                 CorpusFormat format) {
  CorpusWriter writer(path, format);
  for (const auto &d : docs) writer.Write(d);
  writer.Close();
}

void CheckUniqueIds(std::span<const Document> docs) {
  std::unordered_set<std::string_view> seen;
  seen.reserve(docs.size());
  for (const auto &d : docs) {
    if (!seen.insert(d.doc_id).second) {
      throw Error("duplicate doc_id " + d.doc_id);
    }
  }
}

JoinResult JoinParallel(std::span<const Document> a,
                        std::span<const Document> b, Relation relation) {
  CheckUniqueIds(a);
  std::unordered_map<std::string_view, const Document *> by_id;
  by_id.reserve(b.size());
  for (const auto &d : b) {
    if (!by_id.emplace(d.doc_id, &d).second) {
      throw Error("duplicate doc_id " + d.doc_id);
    }
  }
  JoinResult out;
  std::unordered_set<std::string_view> matched;
  for (const auto &d : a) {
    auto it = by_id.find(d.doc_id);
    if (it == by_id.end()) {
      out.unmatched_a.push_back(d.doc_id);
      continue;
    }
    matched.insert(d.doc_id);
    out.pairs.push_back({d.doc_id, d, *it->second, relation});
  }
  for (const auto &d : b) {
    if (!matched.contains(d.doc_id)) out.unmatched_b.push_back(d.doc_id);
  }
  return out;
}

std::vector<json> ReadJsonLines(const std::string &path) {
  std::unique_ptr<std::ifstream> owned;
  std::istream *in = &std::cin;
  if (path != "-") {
    owned = std::make_unique<std::ifstream>(path, std::ios::binary);
    if (!*owned) throw IoError("cannot open " + path);
    in = owned.get();
  }
  std::vector<json> rows;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(*in, line)) {
    ++line_no;
    StripCr(line);
    if (line.find_first_not_of(" \t") == std::string::npos) continue;
    try {
      rows.push_back(json::parse(line));
    } catch (const json::parse_error &e) {
      throw ParseError(path + ": malformed JSON: " + e.what(), line_no);
    }
  }
  return rows;
}

void WriteJsonLines(const std::string &path, std::span<const json> rows) {
  std::string out;
  for (const auto &r : rows) {
    out += r.dump();
    out += '\n';
  }
  WriteFile(path, out);
}

std::string ReadFile(const std::string &path) {
  std::ostringstream ss;
  if (path == "-") {
    ss << std::cin.rdbuf();
    return ss.str();
  }
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path);
  ss << in.rdbuf();
  return ss.str();
}

void WriteFile(const std::string &path, std::string_view content) {
  if (path == "-") {
    std::cout.write(content.data(), static_cast<std::streamsize>(content.size()));
    std::cout.flush();
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open " + path + " for writing");
  out.write(content.data(), static_cast<std::streamsize>(content.size()));
  if (!out) throw IoError("write failure on " + path);
}

}  // namespace mtcorpus
