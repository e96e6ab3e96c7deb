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

// Zero-shot minimal-pair probing: a model gets a pair right when it assigns
// the grammatical sentence a strictly higher log-probability than the
// ungrammatical one. Results are broken down per phenomenon.

#ifndef MTCORPUS_PROBE_H_
#define MTCORPUS_PROBE_H_

#include <cstddef>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"
#include "mtcorpus/clients.h"

namespace mtcorpus {

struct MinimalPair {
  std::string pair_id;
  std::string grammatical;
  std::string ungrammatical;
  std::string phenomenon;
  std::string lang;
};

// JSONL with fields {id, good, bad, phenomenon, lang?}. Rejects missing
// fields (with line number), good == bad ("degenerate pair") and repeated
// ids.
std::vector<MinimalPair> LoadPairs(const std::string &path);
std::vector<MinimalPair> ParsePairs(std::span<const nlohmann::json> rows);

// Scores a list of sentences; returns one total log-probability per
// sentence, NaN for a sentence that could not be scored.
using SentenceScorer =
    std::function<std::vector<double>(const std::vector<std::string> &)>;

// Adapts a TransformClient (kind "logprob").
SentenceScorer MakeClientScorer(TransformClient &client, Params params = {});

struct ProbeOptions {
  // Divide each score by the sentence's word count before comparing.
  bool length_normalize = false;
  // Column order / expected phenomena. Listed phenomena with no items stay
  // in the result with n = 0; unlisted ones are appended in order of first
  // appearance.
  std::vector<std::string> phenomena;
};

struct PhenomenonResult {
  std::string phenomenon;
  std::size_t n = 0;
  std::size_t correct = 0;
  std::size_t ties = 0;
  std::optional<double> accuracy;  // percent; absent when n == 0
};

struct ProbeResult {
  std::vector<PhenomenonResult> phenomena;
  std::size_t n = 0;
  std::size_t correct = 0;
  std::size_t ties = 0;
  double micro_accuracy = 0.0;  // percent, item-weighted
  double macro_accuracy = 0.0;  // percent, mean over non-empty phenomena
};

nlohmann::json ToJson(const ProbeResult &r);
ProbeResult ProbeResultFromJson(const nlohmann::json &j);

// Ties count as incorrect and are tallied separately. Throws Error listing
// the pair ids whose sentences were not scored.
ProbeResult EvaluatePairs(std::span<const MinimalPair> pairs,
                          const SentenceScorer &scorer,
                          const ProbeOptions &options = {});

enum class OverallMode { kMicro, kMacro };

struct ModelResult {
  std::string model;
  ProbeResult result;
};

// One row per model, one column per phenomenon plus "Overall". Percents are
// printed with two decimals; empty phenomena print "-".
std::string BreakdownMarkdown(std::span<const ModelResult> rows,
                              OverallMode mode = OverallMode::kMicro);
std::string BreakdownCsv(std::span<const ModelResult> rows,
                         OverallMode mode = OverallMode::kMicro);

}  // namespace mtcorpus

#endif  // MTCORPUS_PROBE_H_
