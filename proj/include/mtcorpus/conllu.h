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

#ifndef MTCORPUS_CONLLU_H_
#define MTCORPUS_CONLLU_H_

#include <istream>
#include <map>
#include <string>
#include <vector>

#include "mtcorpus/metrics.h"

namespace mtcorpus {

using ParsedCorpus = std::map<std::string, std::vector<ParsedSentence>>;

// Reads a CoNLL-U subset. Documents start at "# newdoc id = X" (or
// "# doc_id = X"); sentences are separated by blank lines. Token lines are
// either full 10-column CoNLL-U (HEAD in column 7) or three columns
// "index<TAB>form<TAB>head". Head 0 is the root. Multiword ranges ("3-4")
// and empty nodes ("3.1") are skipped. Every sentence is validated.
ParsedCorpus ReadConllu(std::istream &in);
ParsedCorpus ReadConllu(const std::string &path);

}  // namespace mtcorpus

#endif  // MTCORPUS_CONLLU_H_
