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

#include "mtcorpus/probe.h"

#include <cmath>
#include <cstdio>
#include <limits>
#include <map>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

#include "mtcorpus/corpus.h"
#include "mtcorpus/error.h"
#include "mtcorpus/metrics.h"

namespace mtcorpus {

using nlohmann::json;

namespace {

std::string Fixed2(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.2f", v);
  return buf;
}

double Pct(std::size_t num, std::size_t den) {
  return 100.0 * static_cast<double>(num) / static_cast<double>(den);
}

// Column order across models: first appearance.
std::vector<std::string> Columns(std::span<const ModelResult> rows) {
  std::vector<std::string> cols;
  std::unordered_set<std::string> seen;
  for (const auto &row : rows) {
    for (const auto &p : row.result.phenomena) {
      if (seen.insert(p.phenomenon).second) cols.push_back(p.phenomenon);
    }
  }
  return cols;
}

std::string Cell(const ProbeResult &r, const std::string &phenomenon) {
  for (const auto &p : r.phenomena) {
    if (p.phenomenon == phenomenon) {
      return p.accuracy ? Fixed2(*p.accuracy) : "-";
    }
  }
  return "-";
}

std::string OverallCell(const ProbeResult &r, OverallMode mode) {
  if (r.n == 0) return "-";
  return Fixed2(mode == OverallMode::kMicro ? r.micro_accuracy
                                            : r.macro_accuracy);
}

}  // namespace

namespace {

MinimalPair ParsePairRow(const json &row, std::size_t line) {
  if (!row.is_object()) throw ParseError("pair record is not an object", line);
  for (const char *field : {"id", "good", "bad", "phenomenon"}) {
    if (!row.contains(field) || row[field].is_null()) {
      throw ParseError(std::string("missing \"") + field + "\" field", line);
    }
  }
  MinimalPair p;
  try {
    p.pair_id = row["id"].is_string() ? row["id"].get<std::string>()
                                      : row["id"].dump();
    p.grammatical = row["good"].get<std::string>();
    p.ungrammatical = row["bad"].get<std::string>();
    p.phenomenon = row["phenomenon"].get<std::string>();
    p.lang = row.value("lang", std::string());
  } catch (const json::exception &e) {
    throw ParseError(std::string("bad pair record: ") + e.what(), line);
  }
  if (p.phenomenon.empty()) throw ParseError("empty phenomenon", line);
  if (p.grammatical == p.ungrammatical) {
    throw ParseError("degenerate pair " + p.pair_id, line);
  }
  return p;
}

void AddUnique(std::vector<MinimalPair> &pairs,
               std::unordered_set<std::string> &ids, MinimalPair p,
               std::size_t line) {
  if (!ids.insert(p.pair_id).second) {
    throw ParseError("duplicate pair id " + p.pair_id, line);
  }
  pairs.push_back(std::move(p));
}

}  // namespace

std::vector<MinimalPair> ParsePairs(std::span<const json> rows) {
  std::vector<MinimalPair> pairs;
  std::unordered_set<std::string> ids;
  std::size_t line = 0;
  for (const auto &row : rows) {
    ++line;
    AddUnique(pairs, ids, ParsePairRow(row, line), line);
  }
  return pairs;
}

std::vector<MinimalPair> LoadPairs(const std::string &path) {
  std::istringstream in(ReadFile(path));
  std::vector<MinimalPair> pairs;
  std::unordered_set<std::string> ids;
  std::string text;
  std::size_t line = 0;
  while (std::getline(in, text)) {
    ++line;
    if (text.find_first_not_of(" \t\r") == std::string::npos) continue;
    json row;
    try {
      row = json::parse(text);
    } catch (const json::parse_error &e) {
      throw ParseError(path + ": malformed JSON: " + e.what(), line);
    }
    AddUnique(pairs, ids, ParsePairRow(row, line), line);
  }
  return pairs;
}

SentenceScorer MakeClientScorer(TransformClient &client, Params params) {
  return [&client, params = std::move(params)](
             const std::vector<std::string> &sentences) {
    TransformRequest request;
    request.kind = TransformKind::kLogprob;
    request.params = params;
    for (std::size_t i = 0; i < sentences.size(); ++i) {
      request.items.push_back({std::to_string(i), sentences[i]});
    }
    std::vector<double> out(sentences.size(),
                            std::numeric_limits<double>::quiet_NaN());
    if (sentences.empty()) return out;
    try {
      for (const auto &[id, lp] : client.Score(request)) {
        out[std::stoul(id)] = lp;
      }
      return out;
    } catch (const ClientError &e) {
      // Rescore what did finish; the rest stays NaN and the evaluator reports
      // those pairs.
      std::unordered_set<std::string> failed(e.unfinished().begin(),
                                             e.unfinished().end());
      std::erase_if(request.items, [&](const TransformItem &item) {
        return failed.contains(item.id);
      });
    }
    if (request.items.empty()) return out;
    try {
      for (const auto &[id, lp] : client.Score(request)) {
        out[std::stoul(id)] = lp;
      }
    } catch (const ClientError &) {
    }
    return out;
  };
}

ProbeResult EvaluatePairs(std::span<const MinimalPair> pairs,
                          const SentenceScorer &scorer,
                          const ProbeOptions &options) {
  std::vector<std::string> sentences;
  sentences.reserve(pairs.size() * 2);
  for (const auto &p : pairs) {
    sentences.push_back(p.grammatical);
    sentences.push_back(p.ungrammatical);
  }
  std::vector<double> scores = scorer(sentences);
  if (scores.size() != sentences.size()) {
    throw Error("scorer returned " + std::to_string(scores.size()) +
                " scores for " + std::to_string(sentences.size()) +
                " sentences");
  }

  ProbeResult result;
  std::unordered_map<std::string, std::size_t> slot;
  for (const auto &name : options.phenomena) {
    if (slot.emplace(name, result.phenomena.size()).second) {
      PhenomenonResult ph;
      ph.phenomenon = name;
      result.phenomena.push_back(ph);
    }
  }
  std::string unscored;
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    double good = scores[2 * i];
    double bad = scores[2 * i + 1];
    if (std::isnan(good) || std::isnan(bad)) {
      unscored += (unscored.empty() ? "" : " ") + pairs[i].pair_id;
      continue;
    }
    if (options.length_normalize) {
      const auto gw = CountWords(pairs[i].grammatical);
      const auto bw = CountWords(pairs[i].ungrammatical);
      good = gw ? good / static_cast<double>(gw) : good;
      bad = bw ? bad / static_cast<double>(bw) : bad;
    }
    auto [it, fresh] = slot.emplace(pairs[i].phenomenon, result.phenomena.size());
    if (fresh) {
      PhenomenonResult fresh_ph;
      fresh_ph.phenomenon = pairs[i].phenomenon;
      result.phenomena.push_back(fresh_ph);
    }
    PhenomenonResult &ph = result.phenomena[it->second];
    ++ph.n;
    if (good > bad) {
      ++ph.correct;
    } else if (good == bad) {
      ++ph.ties;
    }
  }
  if (!unscored.empty()) throw Error("unscored pairs: " + unscored);

  double macro_sum = 0.0;
  std::size_t macro_n = 0;
  for (auto &ph : result.phenomena) {
    result.n += ph.n;
    result.correct += ph.correct;
    result.ties += ph.ties;
    if (ph.n == 0) continue;
    ph.accuracy = Pct(ph.correct, ph.n);
    macro_sum += *ph.accuracy;
    ++macro_n;
  }
  if (result.n > 0) result.micro_accuracy = Pct(result.correct, result.n);
  if (macro_n > 0) result.macro_accuracy = macro_sum / static_cast<double>(macro_n);
  return result;
}

json ToJson(const ProbeResult &r) {
  json phenomena = json::array();
  for (const auto &p : r.phenomena) {
    json entry = {{"phenomenon", p.phenomenon},
                  {"n", p.n},
                  {"correct", p.correct},
                  {"ties", p.ties}};
    entry["accuracy"] = p.accuracy ? json(*p.accuracy) : json(nullptr);
    phenomena.push_back(std::move(entry));
  }
  return {{"phenomena", phenomena},
          {"n", r.n},
          {"correct", r.correct},
          {"ties", r.ties},
          {"micro_accuracy", r.micro_accuracy},
          {"macro_accuracy", r.macro_accuracy}};
}

ProbeResult ProbeResultFromJson(const json &j) {
  ProbeResult r;
  for (const auto &p : j.at("phenomena")) {
    PhenomenonResult ph;
    ph.phenomenon = p.at("phenomenon").get<std::string>();
    ph.n = p.at("n").get<std::size_t>();
    ph.correct = p.at("correct").get<std::size_t>();
    ph.ties = p.value("ties", std::size_t{0});
    if (p.contains("accuracy") && !p["accuracy"].is_null()) {
      ph.accuracy = p["accuracy"].get<double>();
    }
    r.phenomena.push_back(std::move(ph));
  }
  r.n = j.at("n").get<std::size_t>();
  r.correct = j.at("correct").get<std::size_t>();
  r.ties = j.value("ties", std::size_t{0});
  r.micro_accuracy = j.at("micro_accuracy").get<double>();
  r.macro_accuracy = j.at("macro_accuracy").get<double>();
  return r;
}

std::string BreakdownMarkdown(std::span<const ModelResult> rows,
                              OverallMode mode) {
  const auto cols = Columns(rows);
  std::string out = "| Model |";
  for (const auto &c : cols) out += " " + c + " |";
  out += " Overall |\n|---|";
  for (std::size_t i = 0; i <= cols.size(); ++i) out += "---:|";
  out += "\n";
  for (const auto &row : rows) {
    out += "| " + row.model + " |";
    for (const auto &c : cols) out += " " + Cell(row.result, c) + " |";
    out += " " + OverallCell(row.result, mode) + " |\n";
  }
  return out;
}

std::string BreakdownCsv(std::span<const ModelResult> rows, OverallMode mode) {
  const auto cols = Columns(rows);
  std::string out = "model";
  for (const auto &c : cols) out += "," + c;
  out += ",overall\n";
  for (const auto &row : rows) {
    out += row.model;
    for (const auto &c : cols) out += "," + Cell(row.result, c);
    out += "," + OverallCell(row.result, mode) + "\n";
  }
  return out;
}

}  // namespace mtcorpus
