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

// Balanced accuracy over prediction files, seed aggregation, and the
// Markdown / CSV report layouts (corpus statistics, token budgets).

#ifndef MTCORPUS_REPORT_H_
#define MTCORPUS_REPORT_H_

#include <cstddef>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "json.hpp"
#include "mtcorpus/bpe.h"
#include "mtcorpus/metrics.h"

namespace mtcorpus {

struct Prediction {
  std::string example_id;
  std::string gold;
  std::string predicted;
};

// CSV with header "id,gold,pred" (files ending in .csv) or JSONL
// {id, gold, pred}. Ids must be unique.
std::vector<Prediction> LoadPredictions(const std::string &path);

struct BalancedAccuracyResult {
  double value = 0.0;                     // in [0, 1]
  std::map<std::string, double> recall;   // per gold class
  std::size_t unknown_predictions = 0;    // predicted label not a gold class
};

// Unweighted mean of per-class recall over the gold classes present. Throws
// on an empty prediction set.
BalancedAccuracyResult ComputeBalancedAccuracy(
    std::span<const Prediction> predictions);

// Same, with the class set fixed up front; a listed class without gold
// examples is an error.
BalancedAccuracyResult ComputeBalancedAccuracy(
    std::span<const Prediction> predictions,
    std::span<const std::string> classes);

double BalancedAccuracy(std::span<const Prediction> predictions);

struct SeedAggregate {
  std::size_t n = 0;
  double mean = 0.0;
  std::optional<double> stddev;  // sample (n - 1) deviation; needs n >= 2
};

SeedAggregate AggregateSeeds(std::span<const double> values);

nlohmann::json ToJson(const SeedAggregate &a);
// "mean ± std" with `decimals` digits, or just the mean when std is absent.
std::string FormatMeanStd(const SeedAggregate &a, int decimals = 2);

std::string FormatPercent(double pct);  // "12.34%"
std::string FormatCount(std::uint64_t n);  // "3.45B", "9.56M", "812"

// Feature | Simplified | Natural, per-dataset block then cross-dataset block.
std::string CorpusStatsMarkdown(const std::optional<PerDatasetStats> &simplified,
                                const std::optional<PerDatasetStats> &natural,
                                const std::optional<CrossDatasetStats> &cross);

// The seven cross-dataset rows, in report order.
std::vector<std::pair<std::string, std::string>> CrossDatasetRows(
    const CrossDatasetStats &s);

std::string TokenBudgetCsv(std::span<const TokenBudget> budgets);
std::string TokenBudgetMarkdown(std::span<const TokenBudget> budgets);

}  // namespace mtcorpus

#endif  // MTCORPUS_REPORT_H_
