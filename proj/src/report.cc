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

#include "mtcorpus/report.h"

#include <cmath>
#include <cstdio>
#include <set>
#include <sstream>
#include <unordered_set>

#include "mtcorpus/corpus.h"
#include "mtcorpus/error.h"

namespace mtcorpus {

using nlohmann::json;

namespace {

std::string Fixed(double v, int decimals) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.*f", decimals, v);
  return buf;
}

std::vector<std::string> SplitCsvLine(const std::string &line) {
  std::vector<std::string> cells;
  std::string cur;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
        cur += '"';
        ++i;
      } else if (c == '"') {
        quoted = false;
      } else {
        cur += c;
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      cells.push_back(std::move(cur));
      cur.clear();
    } else {
      cur += c;
    }
  }
  cells.push_back(std::move(cur));
  return cells;
}

}  // namespace

std::vector<Prediction> LoadPredictions(const std::string &path) {
  std::vector<Prediction> rows;
  if (path.size() >= 4 && path.compare(path.size() - 4, 4, ".csv") == 0) {
    std::istringstream in(ReadFile(path));
    std::string line;
    std::size_t line_no = 0;
    int id_col = -1, gold_col = -1, pred_col = -1;
    while (std::getline(in, line)) {
      ++line_no;
      if (!line.empty() && line.back() == '\r') line.pop_back();
      if (line.empty()) continue;
      const auto cells = SplitCsvLine(line);
      if (id_col < 0) {
        for (int i = 0; i < static_cast<int>(cells.size()); ++i) {
          if (cells[i] == "id") id_col = i;
          if (cells[i] == "gold") gold_col = i;
          if (cells[i] == "pred" || cells[i] == "predicted") pred_col = i;
        }
        if (id_col < 0 || gold_col < 0 || pred_col < 0) {
          throw ParseError(path + ": header must name id, gold, pred", line_no);
        }
        continue;
      }
      const int need = std::max({id_col, gold_col, pred_col});
      if (static_cast<int>(cells.size()) <= need) {
        throw ParseError(path + ": too few cells", line_no);
      }
      rows.push_back({cells[id_col], cells[gold_col], cells[pred_col]});
    }
  } else {
    std::size_t line_no = 0;
    for (const auto &j : ReadJsonLines(path)) {
      ++line_no;
      try {
        auto str = [&](const char *k) {
          const auto &v = j.at(k);
          return v.is_string() ? v.get<std::string>() : v.dump();
        };
        rows.push_back({str("id"), str("gold"), str("pred")});
      } catch (const json::exception &e) {
        throw ParseError(path + ": " + e.what(), line_no);
      }
    }
  }
  std::unordered_set<std::string> ids;
  for (const auto &r : rows) {
    if (!ids.insert(r.example_id).second) {
      throw Error(path + ": duplicate example id " + r.example_id);
    }
  }
  return rows;
}

BalancedAccuracyResult ComputeBalancedAccuracy(
    std::span<const Prediction> predictions,
    std::span<const std::string> classes) {
  if (classes.empty()) throw Error("balanced accuracy needs at least one class");
  std::map<std::string, std::pair<std::size_t, std::size_t>> tally;  // hit, n
  for (const auto &c : classes) tally[c];
  BalancedAccuracyResult out;
  for (const auto &p : predictions) {
    auto it = tally.find(p.gold);
    if (it == tally.end()) {
      throw Error("gold label " + p.gold + " is not a declared class");
    }
    ++it->second.second;
    if (p.predicted == p.gold) ++it->second.first;
    if (!tally.contains(p.predicted)) ++out.unknown_predictions;
  }
  double sum = 0.0;
  for (const auto &[label, hn] : tally) {
    if (hn.second == 0) {
      throw Error("class " + label + " has no gold examples");
    }
    const double r =
        static_cast<double>(hn.first) / static_cast<double>(hn.second);
    out.recall[label] = r;
    sum += r;
  }
  out.value = sum / static_cast<double>(tally.size());
  return out;
}

BalancedAccuracyResult ComputeBalancedAccuracy(
    std::span<const Prediction> predictions) {
  if (predictions.empty()) throw Error("balanced accuracy of no predictions");
  std::set<std::string> gold;
  for (const auto &p : predictions) gold.insert(p.gold);
  const std::vector<std::string> classes(gold.begin(), gold.end());
  return ComputeBalancedAccuracy(predictions, classes);
}

double BalancedAccuracy(std::span<const Prediction> predictions) {
  return ComputeBalancedAccuracy(predictions).value;
}

SeedAggregate AggregateSeeds(std::span<const double> values) {
  if (values.empty()) throw Error("aggregate of no seed values");
  SeedAggregate a;
  a.n = values.size();
  double sum = 0.0;
  for (double v : values) sum += v;
  a.mean = sum / static_cast<double>(a.n);
  if (a.n >= 2) {
    double ss = 0.0;
    for (double v : values) ss += (v - a.mean) * (v - a.mean);
    a.stddev = std::sqrt(ss / static_cast<double>(a.n - 1));
  }
  return a;
}

json ToJson(const SeedAggregate &a) {
  json j = {{"n", a.n}, {"mean", a.mean}};
  j["std"] = a.stddev ? json(*a.stddev) : json(nullptr);
  return j;
}

std::string FormatMeanStd(const SeedAggregate &a, int decimals) {
  std::string out = Fixed(a.mean, decimals);
  if (a.stddev) out += " ± " + Fixed(*a.stddev, decimals);
  return out;
}

std::string FormatPercent(double pct) { return Fixed(pct, 2) + "%"; }

std::string FormatCount(std::uint64_t n) {
  const double v = static_cast<double>(n);
  if (n >= 1000000000ull) return Fixed(v / 1e9, 2) + "B";
  if (n >= 1000000ull) return Fixed(v / 1e6, 2) + "M";
  if (n >= 1000ull) return Fixed(v / 1e3, 2) + "K";
  return std::to_string(n);
}

std::vector<std::pair<std::string, std::string>> CrossDatasetRows(
    const CrossDatasetStats &s) {
  return {
      {"Compression (<80%)", FormatPercent(s.pct_compression_lt_80)},
      {"Exact match", FormatPercent(s.pct_exact_match)},
      {"High lexical overlap", FormatPercent(s.pct_high)},
      {"Medium lexical overlap", FormatPercent(s.pct_medium)},
      {"Low lexical overlap", FormatPercent(s.pct_low)},
      {"Exact mismatch", FormatPercent(s.pct_exact_mismatch)},
      {"Semantic Sim (>80%)",
       s.pct_sim_gt_80 ? FormatPercent(*s.pct_sim_gt_80) : "-"},
  };
}

std::string CorpusStatsMarkdown(const std::optional<PerDatasetStats> &simplified,
                                const std::optional<PerDatasetStats> &natural,
                                const std::optional<CrossDatasetStats> &cross) {
  std::string out = "| Feature | Simplified | Natural |\n|---|---:|---:|\n";
  if (simplified || natural) {
    auto cell = [](const std::optional<PerDatasetStats> &s, auto fn) {
      return s ? fn(*s) : std::string("-");
    };
    out += "| **Per-dataset Stats** | | |\n";
    out += "| Total words | " +
           cell(simplified, [](auto &s) { return FormatCount(s.total_words); }) +
           " | " +
           cell(natural, [](auto &s) { return FormatCount(s.total_words); }) +
           " |\n";
    out += "| Types (unique words) | " +
           cell(simplified, [](auto &s) { return FormatCount(s.types); }) +
           " | " + cell(natural, [](auto &s) { return FormatCount(s.types); }) +
           " |\n";
    out += "| Type-token ratio (%) | " +
           cell(simplified, [](auto &s) { return FormatPercent(s.ttr); }) +
           " | " + cell(natural, [](auto &s) { return FormatPercent(s.ttr); }) +
           " |\n";
    out += "| Unigram entropy (bits) | " +
           cell(simplified,
                [](auto &s) { return Fixed(s.unigram_entropy, 2); }) +
           " | " +
           cell(natural, [](auto &s) { return Fixed(s.unigram_entropy, 2); }) +
           " |\n";
  }
  if (cross) {
    out += "| **Cross-dataset Stats** | | |\n";
    for (const auto &[label, value] : CrossDatasetRows(*cross)) {
      out += "| " + label + " | " + value + " | - |\n";
    }
  }
  return out;
}

std::string TokenBudgetCsv(std::span<const TokenBudget> budgets) {
  std::string out = BudgetCsvHeader() + "\n";
  for (const auto &b : budgets) out += ToCsvRow(b) + "\n";
  return out;
}

std::string TokenBudgetMarkdown(std::span<const TokenBudget> budgets) {
  std::string out = "| Setup | MT tokens | Native tokens |\n|---|---:|---:|\n";
  for (const auto &b : budgets) {
    out += "| " + b.setup + " | " + FormatCount(b.mt_tokens) + " | " +
           FormatCount(b.native_tokens) + " |\n";
  }
  return out;
}

}  // namespace mtcorpus
