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

#include "mtcorpus/outliers.h"

#include <algorithm>
#include <cmath>

#include "mtcorpus/error.h"
#include "mtcorpus/metrics.h"

namespace mtcorpus {

using nlohmann::json;

double SortedQuantile(std::span<const double> sorted, double p) {
  if (sorted.empty()) throw Error("quantile of an empty sample");
  const double pos = static_cast<double>(sorted.size() - 1) * p;
  const std::size_t lo = static_cast<std::size_t>(std::floor(pos));
  if (lo + 1 >= sorted.size()) return sorted.back();
  const double frac = pos - static_cast<double>(lo);
  return sorted[lo] + frac * (sorted[lo + 1] - sorted[lo]);
}

Quartiles ComputeQuartiles(std::span<const double> values) {
  if (values.empty()) throw Error("quartiles of an empty sample");
  for (double v : values) {
    if (std::isnan(v)) throw Error("quartiles: sample contains NaN");
  }
  std::vector<double> sorted(values.begin(), values.end());
  std::sort(sorted.begin(), sorted.end());
  return {SortedQuantile(sorted, 0.25), SortedQuantile(sorted, 0.5),
          SortedQuantile(sorted, 0.75)};
}

IqrBounds ComputeIqrBounds(std::span<const double> values, double k) {
  if (!(k >= 0)) throw Error("IQR multiplier must be non-negative");
  const Quartiles q = ComputeQuartiles(values);
  IqrBounds b;
  b.q1 = q.q1;
  b.q3 = q.q3;
  b.k = k;
  b.iqr = q.q3 - q.q1;
  b.lower = q.q1 - k * b.iqr;
  b.upper = q.q3 + k * b.iqr;
  return b;
}

std::string_view MetricName(OutlierMetric m) {
  switch (m) {
    case OutlierMetric::kSplitDiff: return "split_diff";
    case OutlierMetric::kCompression: return "compression";
    case OutlierMetric::kDepthRatio: return "depth_ratio";
  }
  return "";
}

OutlierMetric ParseOutlierMetric(std::string_view name) {
  for (auto m : AllOutlierMetrics()) {
    if (MetricName(m) == name) return m;
  }
  throw Error("unknown outlier metric: " + std::string(name));
}

std::optional<double> MetricValue(const MetricRecord &r, OutlierMetric m) {
  switch (m) {
    case OutlierMetric::kSplitDiff: return static_cast<double>(r.split_diff);
    case OutlierMetric::kCompression: return r.compression;
    case OutlierMetric::kDepthRatio: return r.depth_ratio;
  }
  return std::nullopt;
}

json ToJson(const OutlierSummary &s) {
  json j = json::object();
  for (const auto &[m, ms] : s.metrics) {
    json entry = {{"flagged", ms.flagged},
                  {"skipped", ms.skipped},
                  {"pct_flagged", ms.pct_flagged}};
    entry["lower"] = ms.bounds ? json(ms.bounds->lower) : json(nullptr);
    entry["upper"] = ms.bounds ? json(ms.bounds->upper) : json(nullptr);
    j[std::string(MetricName(m))] = entry;
  }
  j["records"] = s.records;
  j["union_flagged"] = s.union_flagged;
  j["union_pct"] = s.union_pct;
  return j;
}

OutlierSummary TagOutliers(std::vector<MetricRecord> &records,
                           std::span<const OutlierMetric> metrics, double k) {
  OutlierSummary summary;
  summary.records = records.size();
  for (auto m : metrics) {
    const std::string name(MetricName(m));
    std::vector<double> values;
    values.reserve(records.size());
    for (auto &r : records) {
      r.outlier_flags.erase(name);
      if (auto v = MetricValue(r, m)) values.push_back(*v);
    }
    MetricOutlierSummary &ms = summary.metrics[m];
    ms.skipped = records.size() - values.size();
    if (values.empty()) continue;
    ms.bounds = ComputeIqrBounds(values, k);
    for (auto &r : records) {
      auto v = MetricValue(r, m);
      if (v && ms.bounds->IsOutlier(*v)) {
        r.outlier_flags.insert(name);
        ++ms.flagged;
      }
    }
  }
  for (const auto &r : records) {
    for (auto m : metrics) {
      if (r.outlier_flags.contains(std::string(MetricName(m)))) {
        ++summary.union_flagged;
        break;
      }
    }
  }
  if (!records.empty()) {
    const double n = static_cast<double>(records.size());
    for (auto &[m, ms] : summary.metrics) {
      ms.pct_flagged = 100.0 * static_cast<double>(ms.flagged) / n;
    }
    summary.union_pct = 100.0 * static_cast<double>(summary.union_flagged) / n;
  }
  return summary;
}

std::vector<MetricRecord> ApplyPlotPolicy(
    std::span<const MetricRecord> records) {
  std::vector<MetricRecord> out;
  out.reserve(records.size());
  for (const auto &r : records) {
    const bool flagged =
        std::any_of(AllOutlierMetrics().begin(), AllOutlierMetrics().end(),
                    [&](OutlierMetric m) {
                      return r.outlier_flags.contains(std::string(MetricName(m)));
                    });
    if (flagged) continue;
    MetricRecord kept = r;
    kept.fre_a = ClipFre(r.fre_a);
    kept.fre_b = ClipFre(r.fre_b);
    out.push_back(std::move(kept));
  }
  return out;
}

}  // namespace mtcorpus
