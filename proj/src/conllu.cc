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

#include "mtcorpus/conllu.h"

#include <fstream>
#include <sstream>

#include "mtcorpus/error.h"

namespace mtcorpus {
namespace {

std::vector<std::string> SplitTabs(const std::string &line) {
  std::vector<std::string> cols;
  std::size_t start = 0;
  while (true) {
    const std::size_t tab = line.find('\t', start);
    cols.push_back(line.substr(start, tab - start));
    if (tab == std::string::npos) break;
    start = tab + 1;
  }
  return cols;
}

bool CommentValue(const std::string &line, std::string_view key,
                  std::string &value) {
  // "# key = value"
  std::size_t pos = 1;
  while (pos < line.size() && line[pos] == ' ') ++pos;
  if (line.compare(pos, key.size(), key) != 0) return false;
  pos += key.size();
  while (pos < line.size() && line[pos] == ' ') ++pos;
  if (pos >= line.size() || line[pos] != '=') return false;
  ++pos;
  while (pos < line.size() && line[pos] == ' ') ++pos;
  value = line.substr(pos);
  while (!value.empty() && value.back() == ' ') value.pop_back();
  return true;
}

}  // namespace

ParsedCorpus ReadConllu(std::istream &in) {
  ParsedCorpus corpus;
  std::string doc_id;
  ParsedSentence sentence;
  std::size_t sentence_line = 0;
  auto flush = [&](std::size_t line_no) {
    if (sentence.heads.empty()) return;
    if (doc_id.empty()) {
      throw ParseError("sentence before any \"# newdoc id\" comment",
                       sentence_line);
    }
    try {
      ValidateTree(sentence);
    } catch (const Error &e) {
      throw ParseError(e.what(), line_no);
    }
    corpus[doc_id].push_back(std::move(sentence));
    sentence = {};
  };

  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) {
      flush(line_no);
      continue;
    }
    if (line[0] == '#') {
      std::string value;
      if (CommentValue(line, "newdoc id", value) ||
          CommentValue(line, "doc_id", value)) {
        flush(line_no);
        doc_id = value;
        corpus[doc_id];
      }
      continue;
    }
    const auto cols = SplitTabs(line);
    if (cols.size() != 3 && cols.size() < 7) {
      throw ParseError("expected 3 or 10 tab-separated columns", line_no);
    }
    const std::string &id = cols[0];
    if (id.find_first_of("-.") != std::string::npos) continue;
    const std::string &head_text = cols.size() == 3 ? cols[2] : cols[6];
    int index = 0;
    int head = 0;
    try {
      index = std::stoi(id);
      head = std::stoi(head_text);
    } catch (const std::exception &) {
      throw ParseError("non-numeric token index or head", line_no);
    }
    if (index != static_cast<int>(sentence.heads.size()) + 1) {
      throw ParseError("token indices must be consecutive from 1", line_no);
    }
    if (sentence.heads.empty()) sentence_line = line_no;
    sentence.tokens.push_back(cols[1]);
    sentence.heads.push_back(head - 1);
  }
  flush(line_no);
  return corpus;
}

ParsedCorpus ReadConllu(const std::string &path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path);
  return ReadConllu(in);
}

}  // namespace mtcorpus
