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

#include <random>
#include <sstream>

#include "doctest.h"
#include "mtcorpus/error.h"
#include "test_util.h"

using namespace mtcorpus;
using testing_util::TempDir;

namespace {

std::vector<Document> ReadAll(std::istream &in, CorpusFormat format) {
  CorpusReader reader(in, format);
  std::vector<Document> docs;
  while (auto d = reader.Next()) docs.push_back(std::move(*d));
  return docs;
}

}  // namespace

TEST_CASE("jsonl reader preserves file order") {
  std::istringstream in(
      "{\"id\":\"a\",\"text\":\"x\"}\n{\"id\":\"b\",\"text\":\"y\"}\n"
      "{\"id\":\"c\",\"text\":\"z\",\"meta\":{\"lang\":\"en\",\"n\":3}}\n");
  const auto docs = ReadAll(in, CorpusFormat::kJsonl);
  REQUIRE(docs.size() == 3);
  CHECK(docs[0].doc_id == "a");
  CHECK(docs[1].doc_id == "b");
  CHECK(docs[2].doc_id == "c");
  CHECK(docs[2].meta.at("lang") == "en");
  CHECK(docs[2].meta.at("n") == "3");
}

TEST_CASE("empty input yields no documents") {
  std::istringstream in("");
  CHECK(ReadAll(in, CorpusFormat::kJsonl).empty());
  std::istringstream in2("");
  CHECK(ReadAll(in2, CorpusFormat::kPlainText).empty());
}

TEST_CASE("missing text field reports the line") {
  std::istringstream in("{\"id\":\"a\"}\n");
  CorpusReader reader(in, CorpusFormat::kJsonl);
  try {
    reader.Next();
    FAIL("expected a parse error");
  } catch (const ParseError &e) {
    CHECK(e.line() == 1);
    CHECK(std::string(e.what()).find("text") != std::string::npos);
  }

  std::istringstream in2("{\"id\":\"a\",\"text\":\"ok\"}\n\n{\"id\":\"b\"}\n");
  CorpusReader reader2(in2, CorpusFormat::kJsonl);
  CHECK(reader2.Next().has_value());
  try {
    reader2.Next();
    FAIL("expected a parse error");
  } catch (const ParseError &e) {
    CHECK(e.line() == 3);
  }
}

TEST_CASE("malformed json and non-object records are rejected") {
  CHECK_THROWS_AS(ParseJsonlDocument("{\"id\":", 4), ParseError);
  CHECK_THROWS_AS(ParseJsonlDocument("[1,2]", 4), ParseError);
  CHECK_THROWS_AS(ParseJsonlDocument("{\"id\":\"\",\"text\":\"x\"}", 4),
                  ParseError);
  CHECK(ParseJsonlDocument("{\"id\":17,\"text\":\"x\"}", 1).doc_id == "17");
}

TEST_CASE("invalid utf-8 reports the byte offset within the file") {
  std::string data = "{\"id\":\"a\",\"text\":\"ok\"}\n";
  const std::size_t second = data.size();
  data += "{\"id\":\"b\",\"text\":\"bad \xC3\x28\"}\n";
  std::istringstream in(data);
  CorpusReader reader(in, CorpusFormat::kJsonl);
  reader.Next();
  try {
    reader.Next();
    FAIL("expected a utf-8 error");
  } catch (const Utf8Error &e) {
    CHECK(e.byte_offset() == second + 22);
  }
}

TEST_CASE("plain text lines get synthesized ids") {
  std::istringstream in("first doc\r\n\nthird doc\n");
  const auto docs = ReadAll(in, CorpusFormat::kPlainText);
  REQUIRE(docs.size() == 3);
  CHECK(docs[0].doc_id == "line-1");
  CHECK(docs[0].text == "first doc");
  CHECK(docs[1].text.empty());
  CHECK(docs[2].doc_id == "line-3");
}

TEST_CASE("round trip through files is the identity") {
  TempDir dir;
  std::mt19937 rng(7);
  const std::string alphabet[] = {"a", "Z", " ", "\n", "\"", "\\", "\t", "é",
                                  "த", "ு", "{", "}", "\r", "\x01", "日"};
  std::vector<Document> docs;
  for (int i = 0; i < 100; ++i) {
    Document d;
    d.doc_id = "doc-" + std::to_string(i);
    const int len = static_cast<int>(rng() % 40);
    for (int k = 0; k < len; ++k) d.text += alphabet[rng() % std::size(alphabet)];
    if (i % 3 == 0) d.meta["source"] = "wiki\n\"quoted\"";
    docs.push_back(d);
  }
  const auto path = dir.File("c.jsonl");
  WriteCorpus(docs, path, CorpusFormat::kJsonl);
  CHECK(ReadCorpus(path, CorpusFormat::kJsonl) == docs);

  WriteCorpus({}, dir.File("empty.jsonl"), CorpusFormat::kJsonl);
  CHECK(ReadFile(dir.File("empty.jsonl")).empty());
  CHECK(ReadCorpus(dir.File("empty.jsonl"), CorpusFormat::kJsonl).empty());
}

TEST_CASE("plain text round trip and line-break rejection") {
  TempDir dir;
  std::vector<Document> docs = {{"line-1", "one", {}}, {"line-2", "", {}},
                                {"line-3", "three", {}}};
  WriteCorpus(docs, dir.File("c.txt"), CorpusFormat::kPlainText);
  CHECK(ReadCorpus(dir.File("c.txt"), CorpusFormat::kPlainText) == docs);

  std::ostringstream out;
  CorpusWriter w(out, CorpusFormat::kPlainText);
  CHECK_THROWS_AS(w.Write({"x", "two\nlines", {}}), Error);
}

TEST_CASE("missing input file surfaces the path") {
  try {
    ReadCorpus("/nonexistent/dir/corpus.jsonl", CorpusFormat::kJsonl);
    FAIL("expected an io error");
  } catch (const IoError &e) {
    CHECK(std::string(e.what()).find("/nonexistent/dir/corpus.jsonl") !=
          std::string::npos);
  }
  std::vector<Document> one = {{"a", "b", {}}};
  CHECK_THROWS_AS(WriteCorpus(one, "/nonexistent/dir/out.jsonl",
                              CorpusFormat::kJsonl),
                  IoError);
}

TEST_CASE("join_parallel intersects ids and reports the rest") {
  std::vector<Document> a = {{"1", "a1", {}}, {"2", "a2", {}}, {"3", "a3", {}}};
  std::vector<Document> b = {{"4", "b4", {}}, {"3", "b3", {}}, {"2", "b2", {}}};
  const auto r = JoinParallel(a, b);
  REQUIRE(r.pairs.size() == 2);
  CHECK(r.pairs[0].pair_id == "2");
  CHECK(r.pairs[1].pair_id == "3");
  CHECK(r.pairs[0].side_b.text == "b2");
  CHECK(r.unmatched_a == std::vector<std::string>{"1"});
  CHECK(r.unmatched_b == std::vector<std::string>{"4"});

  const auto same = JoinParallel(a, a);
  CHECK(same.pairs.size() == 3);
  CHECK(same.unmatched_a.empty());
  CHECK(same.unmatched_b.empty());
}

TEST_CASE("join_parallel rejects duplicate ids") {
  std::vector<Document> a = {{"x", "1", {}}, {"x", "2", {}}};
  std::vector<Document> b = {{"x", "1", {}}};
  try {
    JoinParallel(a, b);
    FAIL("expected an error");
  } catch (const Error &e) {
    CHECK(std::string(e.what()) == "duplicate doc_id x");
  }
}

TEST_CASE("join_parallel partitions side a") {
  std::mt19937 rng(11);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<Document> a, b;
    for (int i = 0; i < 30; ++i) {
      if (rng() % 2) a.push_back({std::to_string(i), "", {}});
      if (rng() % 2) b.push_back({std::to_string(i), "", {}});
    }
    const auto r = JoinParallel(a, b);
    std::set<std::string> ids_b;
    for (const auto &d : b) ids_b.insert(d.doc_id);
    std::size_t expected = 0;
    for (const auto &d : a) expected += ids_b.count(d.doc_id);
    CHECK(r.pairs.size() == expected);
    CHECK(r.pairs.size() + r.unmatched_a.size() == a.size());
    CHECK(r.pairs.size() + r.unmatched_b.size() == b.size());
  }
}

TEST_CASE("metric records serialize to json and csv") {
  MetricRecord r;
  r.pair_id = "p1";
  r.fre_a = 55.5;
  r.fre_b = 70.25;
  r.compression = 0.8;
  r.split_diff = -2;
  r.depth_ratio = 1.5;
  r.rouge2 = 0.25;
  r.rougeL = 0.5;
  r.outlier_flags = {"compression", "split_diff"};
  CHECK(MetricRecordFromJson(ToJson(r)) == r);
  r.depth_ratio.reset();
  CHECK(MetricRecordFromJson(ToJson(r)) == r);
  CHECK(MetricCsvHeader().find("pair_id") == 0);
  const std::string row = ToCsvRow(r);
  CHECK(row.find("p1,55.5,70.25,0.8,-2,") == 0);
  CHECK(row.find("compression;split_diff") != std::string::npos);
}

TEST_CASE("manifest validation") {
  CorpusManifest m;
  m.name = "id-mt";
  m.document_count = 10;
  m.vocabularies = {"bpe-id"};
  m.token_counts = {{"bpe-id", 1234}};
  CHECK_NOTHROW(m.Validate());
  const auto back = ManifestFromJson(ToJson(m));
  CHECK(back.name == m.name);
  CHECK(back.token_counts == m.token_counts);
  m.vocabularies.push_back("bpe-ta");
  CHECK_THROWS_AS(m.Validate(), Error);
}
