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

// IQR outlier tagging over per-pair metric distributions, and the cleanup
// policy used before plotting: FRE is clipped to [0, 100]; records flagged on
// split difference, compression or depth ratio are removed.

#ifndef MTCORPUS_OUTLIERS_H_
#define MTCORPUS_OUTLIERS_H_

#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"
#include "mtcorpus/corpus.h"

namespace mtcorpus {

struct Quartiles {
  double q1 = 0.0;
  double median = 0.0;
  double q3 = 0.0;
};

// Linear interpolation between order statistics: for probability p the
// position is (n - 1) * p on the sorted sample. Throws on empty input or NaN.
Quartiles ComputeQuartiles(std::span<const double> values);

// Same, on a sample already sorted ascending.
double SortedQuantile(std::span<const double> sorted, double p);

struct IqrBounds {
  double q1 = 0.0;
  double q3 = 0.0;
  double k = 3.0;
  double iqr = 0.0;
  double lower = 0.0;
  double upper = 0.0;

  // Values strictly below `lower` or strictly above `upper`.
  bool IsOutlier(double v) const { return v < lower || v > upper; }
};

inline constexpr double kDefaultIqrK = 3.0;

IqrBounds ComputeIqrBounds(std::span<const double> values,
                           double k = kDefaultIqrK);

enum class OutlierMetric { kSplitDiff, kCompression, kDepthRatio };

std::string_view MetricName(OutlierMetric m);
OutlierMetric ParseOutlierMetric(std::string_view name);
std::optional<double> MetricValue(const MetricRecord &r, OutlierMetric m);

inline const std::vector<OutlierMetric> &AllOutlierMetrics() {
  static const std::vector<OutlierMetric> kAll = {
      OutlierMetric::kSplitDiff, OutlierMetric::kCompression,
      OutlierMetric::kDepthRatio};
  return kAll;
}

struct MetricOutlierSummary {
  std::optional<IqrBounds> bounds;  // absent when no record carries the metric
  std::size_t flagged = 0;
  std::size_t skipped = 0;  // records without a value for this metric
  double pct_flagged = 0.0;
};

// Percentages use the total record count as denominator.
struct OutlierSummary {
  std::size_t records = 0;
  std::map<OutlierMetric, MetricOutlierSummary> metrics;
  std::size_t union_flagged = 0;
  double union_pct = 0.0;
};

nlohmann::json ToJson(const OutlierSummary &s);

// Two passes: bounds per metric over the present values, then tagging. Flags
// for the requested metrics are recomputed; other flags are preserved.
OutlierSummary TagOutliers(std::vector<MetricRecord> &records,
                           std::span<const OutlierMetric> metrics,
                           double k = kDefaultIqrK);

// Clips both FRE values and drops records flagged on any of the three
// IQR-tagged metrics. Idempotent.
std::vector<MetricRecord> ApplyPlotPolicy(std::span<const MetricRecord> records);

}  // namespace mtcorpus

#endif  // MTCORPUS_OUTLIERS_H_
