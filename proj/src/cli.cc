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

#include "mtcorpus/cli.h"

#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "mtcorpus/bpe.h"
#include "mtcorpus/conllu.h"
#include "mtcorpus/corpus.h"
#include "mtcorpus/error.h"
#include "mtcorpus/metrics.h"
#include "mtcorpus/outliers.h"
#include "mtcorpus/probe.h"
#include "mtcorpus/report.h"

namespace mtcorpus {

using nlohmann::json;

json ToJson(const RunConfig &c) {
  return {{"profile", c.profile},
          {"min_tokens", c.bounds.min_tokens},
          {"max_tokens", c.bounds.max_tokens},
          {"ratio_cap", c.ratio_cap},
          {"iqr_k", c.iqr_k},
          {"vocab_size", c.vocab_size},
          {"context", c.context},
          {"endpoint", c.endpoint},
          {"cache_root", c.cache_root},
          {"batch_size", c.batch_size},
          {"concurrency", c.concurrency},
          {"max_attempts", c.max_attempts},
          {"backoff_ms", c.backoff_ms}};
}

namespace {

bool EndsWith(const std::string &s, std::string_view suffix) {
  return s.size() >= suffix.size() &&
         s.compare(s.size() - suffix.size(), suffix.size(), suffix) == 0;
}

class Cli {
 public:
  Cli(const CliEnvironment &env, const std::vector<std::string> &argv)
      : out_(env.out ? *env.out : std::cout),
        err_(env.err ? *env.err : std::cerr),
        factory_(env.transport_factory),
        getenv_(env.getenv),
        argv_(argv) {
    if (!getenv_) {
      getenv_ = [](const std::string &name) -> std::optional<std::string> {
        const char *v = std::getenv(name.c_str());
        if (v == nullptr || *v == '\0') return std::nullopt;
        return std::string(v);
      };
    }
    if (!factory_) {
      factory_ = [](const std::string &endpoint, const RunConfig &c) {
        return std::make_shared<HttpTransport>(endpoint, c.token);
      };
    }
  }

  int Run();

 private:
  // Shared settings -----------------------------------------------------
  void AddGlobalOptions(CLI::App &app);
  bool GivenOnCommandLine(std::string_view flag) const;
  RunConfig Resolve();
  TransformClient MakeClient(const RunConfig &config);
  Params ParseParams() const;

  // Output helpers ------------------------------------------------------
  void Emit(const std::string &path, std::string_view content);
  void EmitJson(const std::string &path, const json &j);
  void WriteDocs(const std::string &path, std::span<const Document> docs);
  std::vector<Document> ReadDocs(const std::string &path);

  // Subcommands ---------------------------------------------------------
  void Stats();
  void Compare();
  void Outliers();
  void FilterPre();
  void Translate();
  void FilterPost();
  void Reconstruct();
  void Simplify();
  void TokTrain();
  void TokCount();
  void Pack();
  void Probe();
  void Balacc();
  void Report();

  std::ostream &out_;
  std::ostream &err_;
  TransportFactory factory_;
  std::function<std::optional<std::string>(const std::string &)> getenv_;
  std::vector<std::string> argv_;

  // Global option storage.
  std::string profile_ = "id";
  std::optional<std::size_t> min_tokens_, max_tokens_;
  double ratio_cap_ = 2.0;
  double iqr_k_ = kDefaultIqrK;
  std::size_t vocab_size_ = kDefaultVocabSize;
  std::size_t context_ = kDefaultContextLength;
  std::string endpoint_, cache_root_, token_;
  std::size_t batch_size_ = 32;
  std::size_t concurrency_ = 8;
  int max_attempts_ = 5;
  int backoff_ms_ = 200;
  std::string format_ = "jsonl";
  std::vector<std::string> params_;

  // Subcommand option storage.
  std::string in_, out_path_ = "-", report_, summary_;
  std::vector<std::string> inputs_;
  std::string natural_, simplified_, natural_parses_, simplified_parses_;
  bool embed_ = false;
  std::vector<std::string> metrics_;
  bool apply_policy_ = false;
  std::string source_, target_, source_out_, order_;
  std::string prompt_;
  bool similarity_check_ = false;
  std::string model_dir_, mt_, native_, setup_;
  bool append_ = false;
  std::string pairs_, markdown_, model_name_;
  bool length_normalize_ = false;
  std::vector<std::string> phenomena_;
  std::string kind_, table_format_ = "md", simplified_stats_, natural_stats_,
                     cross_;
  std::string overall_ = "micro";

  CLI::App *active_ = nullptr;
};

void Cli::AddGlobalOptions(CLI::App &app) {
  app.add_option("--profile", profile_, "Language profile (id | ta)")
      ->check(CLI::IsMember({"id", "ta"}));
  app.add_option("--min-tokens", min_tokens_, "Minimum words per sentence");
  app.add_option("--max-tokens", max_tokens_, "Maximum words per sentence");
  app.add_option("--ratio-cap", ratio_cap_,
                 "Maximum target/source sentence length ratio");
  app.add_option("--iqr-k", iqr_k_, "IQR multiplier for outlier bounds");
  app.add_option("--vocab-size", vocab_size_, "BPE vocabulary size");
  app.add_option("--context", context_, "Packed sequence length");
  app.add_option("--endpoint", endpoint_, "Transform service base URL");
  app.add_option("--cache", cache_root_, "Response cache directory");
  app.add_option("--token", token_, "Bearer token for the endpoint");
  app.add_option("--batch-size", batch_size_, "Items per request");
  app.add_option("--concurrency", concurrency_, "Requests in flight");
  app.add_option("--retries", max_attempts_, "Attempts per batch");
  app.add_option("--backoff-ms", backoff_ms_, "Initial retry backoff");
  app.add_option("--format", format_, "Corpus format (jsonl | text)")
      ->check(CLI::IsMember({"jsonl", "text"}));
  app.add_option("--param", params_, "Request parameter key=value");
}

bool Cli::GivenOnCommandLine(std::string_view flag) const {
  for (const auto &a : argv_) {
    if (a == flag) return true;
    if (a.size() > flag.size() && a.compare(0, flag.size(), flag) == 0 &&
        a[flag.size()] == '=') {
      return true;
    }
  }
  return false;
}

RunConfig Cli::Resolve() {
  RunConfig c;
  c.profile = profile_;
  c.bounds = ProfileBounds(profile_);
  if (min_tokens_) c.bounds.min_tokens = *min_tokens_;
  if (max_tokens_) c.bounds.max_tokens = *max_tokens_;
  c.bounds.Validate();
  c.ratio_cap = ratio_cap_;
  c.iqr_k = iqr_k_;
  c.vocab_size = vocab_size_;
  c.context = context_;
  c.endpoint = endpoint_;
  if (!GivenOnCommandLine("--endpoint")) {
    if (auto env = getenv_("MTCORPUS_ENDPOINT")) c.endpoint = *env;
  }
  c.cache_root = cache_root_;
  if (!GivenOnCommandLine("--cache")) {
    if (auto env = getenv_("MTCORPUS_CACHE")) c.cache_root = *env;
  }
  c.token = token_;
  c.batch_size = batch_size_;
  c.concurrency = concurrency_;
  c.max_attempts = max_attempts_;
  c.backoff_ms = backoff_ms_;
  return c;
}

TransformClient Cli::MakeClient(const RunConfig &config) {
  if (config.endpoint.empty()) {
    throw Error("no endpoint configured (use --endpoint or MTCORPUS_ENDPOINT)");
  }
  ClientOptions options;
  options.batch_size = config.batch_size;
  options.max_in_flight = config.concurrency;
  options.max_attempts = config.max_attempts;
  options.initial_backoff = std::chrono::milliseconds(config.backoff_ms);
  if (!config.cache_root.empty()) options.cache_root = config.cache_root;
  return TransformClient(factory_(config.endpoint, config), options);
}

Params Cli::ParseParams() const {
  Params params;
  for (const auto &kv : params_) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos || eq == 0) {
      throw Error("--param expects key=value, got " + kv);
    }
    params[kv.substr(0, eq)] = kv.substr(eq + 1);
  }
  return params;
}

void Cli::Emit(const std::string &path, std::string_view content) {
  if (path == "-") {
    out_.write(content.data(), static_cast<std::streamsize>(content.size()));
    out_.flush();
  } else {
    WriteFile(path, content);
  }
}

void Cli::EmitJson(const std::string &path, const json &j) {
  Emit(path, j.dump(2) + "\n");
}

void Cli::WriteDocs(const std::string &path, std::span<const Document> docs) {
  const CorpusFormat format = ParseCorpusFormat(format_);
  if (path == "-") {
    CorpusWriter w(out_, format);
    for (const auto &d : docs) w.Write(d);
    w.Close();
  } else {
    WriteCorpus(docs, path, format);
  }
}

std::vector<Document> Cli::ReadDocs(const std::string &path) {
  return ReadCorpus(path, ParseCorpusFormat(format_));
}

void Cli::Stats() {
  CorpusReader reader(in_, ParseCorpusFormat(format_));
  EmitJson(out_path_, ToJson(ComputePerDatasetStats(reader)));
}

void Cli::Compare() {
  const RunConfig config = Resolve();
  const auto natural = ReadDocs(natural_);
  const auto simplified = ReadDocs(simplified_);
  const JoinResult joined = JoinParallel(natural, simplified);
  if (!joined.unmatched_a.empty() || !joined.unmatched_b.empty()) {
    err_ << "mtcorpus: compare: " << joined.unmatched_a.size()
         << " natural and " << joined.unmatched_b.size()
         << " simplified documents unmatched; excluded\n";
  }
  if (joined.pairs.empty()) throw Error("no parallel pairs to compare");
  ParsedCorpus nat_parses, simp_parses;
  if (!natural_parses_.empty()) nat_parses = ReadConllu(natural_parses_);
  if (!simplified_parses_.empty()) simp_parses = ReadConllu(simplified_parses_);

  std::unordered_map<std::string, std::vector<double>> embeddings;
  if (embed_) {
    TransformClient client = MakeClient(config);
    TransformRequest request;
    request.kind = TransformKind::kEmbed;
    request.params = ParseParams();
    for (const auto &p : joined.pairs) {
      request.items.push_back({"a:" + p.pair_id, p.side_a.text});
      request.items.push_back({"b:" + p.pair_id, p.side_b.text});
    }
    for (auto &[id, v] : client.Embed(request)) embeddings[id] = std::move(v);
  }

  std::vector<MetricRecord> records;
  records.reserve(joined.pairs.size());
  static const std::vector<ParsedSentence> kNone;
  for (const auto &p : joined.pairs) {
    PairInputs in;
    auto na = nat_parses.find(p.pair_id);
    auto sa = simp_parses.find(p.pair_id);
    in.natural_parses = na == nat_parses.end() ? kNone : na->second;
    in.simplified_parses = sa == simp_parses.end() ? kNone : sa->second;
    if (embed_) {
      in.natural_embedding = std::span<const double>(embeddings.at("a:" + p.pair_id));
      in.simplified_embedding =
          std::span<const double>(embeddings.at("b:" + p.pair_id));
    }
    records.push_back(ComputeMetrics(p, in));
  }

  std::string body;
  if (EndsWith(out_path_, ".csv")) {
    body = MetricCsvHeader() + "\n";
    for (const auto &r : records) body += ToCsvRow(r) + "\n";
  } else {
    for (const auto &r : records) body += ToJson(r).dump() + "\n";
  }
  Emit(out_path_, body);
  if (!summary_.empty()) {
    EmitJson(summary_, ToJson(ComputeCrossDatasetStats(records)));
  }
}

void Cli::Outliers() {
  const RunConfig config = Resolve();
  std::vector<MetricRecord> records;
  for (const auto &row : ReadJsonLines(in_)) {
    records.push_back(MetricRecordFromJson(row));
  }
  std::vector<OutlierMetric> which;
  if (metrics_.empty()) {
    which = AllOutlierMetrics();
  } else {
    for (const auto &m : metrics_) which.push_back(ParseOutlierMetric(m));
  }
  const OutlierSummary summary = TagOutliers(records, which, config.iqr_k);
  if (apply_policy_) records = ApplyPlotPolicy(records);
  std::string body;
  for (const auto &r : records) body += ToJson(r).dump() + "\n";
  Emit(out_path_, body);
  if (!summary_.empty()) {
    EmitJson(summary_, ToJson(summary));
  } else {
    err_ << ToJson(summary).dump() << "\n";
  }
}

void Cli::FilterPre() {
  const RunConfig config = Resolve();
  const auto docs = ReadDocs(in_);
  const auto result = PreMtFilter(docs, config.bounds);
  WriteDocs(out_path_, result.kept);
  const json report = ToJson(result.report);
  if (!report_.empty()) {
    EmitJson(report_, report);
  } else {
    err_ << "mtcorpus: filter-pre: kept " << result.report.kept << ", dropped "
         << result.report.dropped << " (bounds " << config.bounds.min_tokens
         << "-" << config.bounds.max_tokens << ")\n";
  }
}

void Cli::Translate() {
  const RunConfig config = Resolve();
  const auto docs = ReadDocs(in_);
  const auto sentences = ToSentenceRecords(docs);
  if (!source_out_.empty()) WriteSentences(source_out_, sentences);
  std::vector<SentenceRecord> translated;
  if (!sentences.empty()) {
    TransformClient client = MakeClient(config);
    TransformRequest request;
    request.kind = TransformKind::kTranslate;
    request.params = ParseParams();
    for (std::size_t i = 0; i < sentences.size(); ++i) {
      request.items.push_back(
          {sentences[i].doc_id + "#" + std::to_string(sentences[i].index),
           sentences[i].text});
    }
    const auto out = client.Translate(request);
    translated.reserve(out.size());
    for (std::size_t i = 0; i < out.size(); ++i) {
      translated.push_back({sentences[i].doc_id, sentences[i].index, out[i].second});
    }
  }
  std::string body;
  for (const auto &s : translated) body += ToJson(s).dump() + "\n";
  Emit(out_path_, body);
}

void Cli::FilterPost() {
  const RunConfig config = Resolve();
  const auto source = ReadSentences(source_);
  const auto target = ReadSentences(target_);
  const auto result = PostMtFilter(source, target, config.ratio_cap);
  std::string body;
  for (const auto &s : result.kept_target) body += ToJson(s).dump() + "\n";
  Emit(out_path_, body);
  if (!source_out_.empty()) WriteSentences(source_out_, result.kept_source);
  if (!report_.empty()) {
    EmitJson(report_, ToJson(result.report));
  } else {
    err_ << "mtcorpus: filter-post: kept " << result.report.kept
         << ", dropped " << result.report.dropped << "\n";
  }
}

void Cli::Reconstruct() {
  const auto records = ReadSentences(in_);
  std::vector<std::string> order;
  if (!order_.empty()) {
    for (const auto &d : ReadDocs(order_)) order.push_back(d.doc_id);
  }
  WriteDocs(out_path_, ReconstructDocuments(records, order));
}

void Cli::Simplify() {
  const RunConfig config = Resolve();
  auto docs = ReadDocs(in_);
  PromptTemplate prompt = DefaultSimplifyPrompt();
  if (!prompt_.empty()) prompt.text = ReadFile(prompt_);
  prompt.Validate();
  if (!docs.empty()) {
    TransformClient client = MakeClient(config);
    TransformRequest request;
    request.kind = TransformKind::kSimplify;
    request.params = ParseParams();
    for (const auto &d : docs) request.items.push_back({d.doc_id, d.text});
    SimplifyOptions options;
    options.similarity_check = similarity_check_;
    const auto results = client.Simplify(request, prompt, options);
    std::size_t degenerate = 0;
    for (std::size_t i = 0; i < docs.size(); ++i) {
      docs[i].text = results[i].text;
      docs[i].meta["degenerate"] = results[i].degenerate ? "true" : "false";
      if (results[i].cosine) {
        docs[i].meta["cosine"] = json(*results[i].cosine).dump();
      }
      degenerate += results[i].degenerate;
    }
    err_ << "mtcorpus: simplify: " << degenerate << " of " << docs.size()
         << " outputs flagged degenerate\n";
  }
  WriteDocs(out_path_, docs);
}

void Cli::TokTrain() {
  const RunConfig config = Resolve();
  BpeTrainer trainer;
  for (const auto &path : inputs_) {
    CorpusReader reader(path, ParseCorpusFormat(format_));
    while (auto doc = reader.Next()) trainer.AddText(doc->text);
  }
  BpeTrainOptions options;
  options.vocab_size = config.vocab_size;
  const BpeModel model = trainer.Train(options);
  model.Save(out_path_);
  if (model.base_size() < config.vocab_size) {
    err_ << "mtcorpus: tok-train: corpus exhausted after "
         << model.merges().size() << " merges; vocabulary has "
         << model.base_size() << " of " << config.vocab_size << " tokens\n";
  }
}

void Cli::TokCount() {
  const BpeModel model = BpeModel::Load(model_dir_);
  TokenBudget budget;
  budget.setup = setup_;
  if (!mt_.empty()) {
    CorpusReader reader(mt_, ParseCorpusFormat(format_));
    budget.mt_tokens = CountTokens(reader, model);
  }
  if (!native_.empty()) {
    CorpusReader reader(native_, ParseCorpusFormat(format_));
    budget.native_tokens = CountTokens(reader, model);
  }
  if (append_ && out_path_ != "-" && std::filesystem::exists(out_path_)) {
    std::string existing = ReadFile(out_path_);
    if (!existing.empty() && existing.back() != '\n') existing += '\n';
    WriteFile(out_path_, existing + ToCsvRow(budget) + "\n");
    return;
  }
  Emit(out_path_, BudgetCsvHeader() + "\n" + ToCsvRow(budget) + "\n");
}

void Cli::Pack() {
  const RunConfig config = Resolve();
  const BpeModel model = BpeModel::Load(model_dir_);
  std::ostringstream body;
  SequencePacker packer(model.pad_id(), config.context,
                        [&](std::span<const TokenId> row) {
                          for (std::size_t i = 0; i < row.size(); ++i) {
                            if (i) body << ' ';
                            body << row[i];
                          }
                          body << '\n';
                        });
  CorpusReader reader(in_, ParseCorpusFormat(format_));
  while (auto doc = reader.Next()) packer.AddDocument(model.Encode(doc->text));
  packer.Finish();
  Emit(out_path_, body.str());
}

void Cli::Probe() {
  const RunConfig config = Resolve();
  const auto pairs = LoadPairs(pairs_);
  TransformClient client = MakeClient(config);
  ProbeOptions options;
  options.length_normalize = length_normalize_;
  options.phenomena = phenomena_;
  const ProbeResult result =
      EvaluatePairs(pairs, MakeClientScorer(client, ParseParams()), options);
  json j = ToJson(result);
  j["model"] = model_name_;
  EmitJson(out_path_, j);
  if (!markdown_.empty()) {
    const ModelResult row{model_name_, result};
    Emit(markdown_, BreakdownMarkdown(std::span<const ModelResult>(&row, 1),
                                      overall_ == "macro" ? OverallMode::kMacro
                                                          : OverallMode::kMicro));
  }
}

void Cli::Balacc() {
  json files = json::array();
  std::vector<double> values;
  for (const auto &path : inputs_) {
    const auto preds = LoadPredictions(path);
    const auto r = ComputeBalancedAccuracy(preds);
    values.push_back(r.value);
    files.push_back({{"path", path},
                     {"balanced_accuracy", r.value},
                     {"recall", r.recall},
                     {"unknown_predictions", r.unknown_predictions}});
  }
  const SeedAggregate agg = AggregateSeeds(values);
  EmitJson(out_path_, {{"files", files},
                       {"aggregate", ToJson(agg)},
                       {"formatted", FormatMeanStd(agg, 4)}});
}

void Cli::Report() {
  const bool csv = table_format_ == "csv";
  if (kind_ == "corpus") {
    std::optional<PerDatasetStats> simp, nat;
    std::optional<CrossDatasetStats> cross;
    auto load_stats = [](const std::string &path) {
      const auto j = json::parse(ReadFile(path));
      PerDatasetStats s;
      s.total_words = j.at("total_words").get<std::uint64_t>();
      s.types = j.at("types").get<std::uint64_t>();
      s.ttr = j.at("ttr").get<double>();
      s.unigram_entropy = j.at("unigram_entropy").get<double>();
      return s;
    };
    if (!simplified_stats_.empty()) simp = load_stats(simplified_stats_);
    if (!natural_stats_.empty()) nat = load_stats(natural_stats_);
    if (!cross_.empty()) {
      cross = CrossDatasetStatsFromJson(json::parse(ReadFile(cross_)));
    }
    if (csv) {
      if (!cross) throw Error("report --kind corpus --table csv needs --cross");
      std::string body = "feature,value\n";
      for (const auto &[k, v] : CrossDatasetRows(*cross)) body += k + "," + v + "\n";
      Emit(out_path_, body);
    } else {
      Emit(out_path_, CorpusStatsMarkdown(simp, nat, cross));
    }
  } else if (kind_ == "budget") {
    std::vector<TokenBudget> budgets;
    for (const auto &path : inputs_) {
      std::istringstream in(ReadFile(path));
      std::string line;
      bool header = true;
      while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        if (header) {
          header = false;
          if (line == BudgetCsvHeader()) continue;
        }
        const auto c1 = line.find(',');
        const auto c2 = line.find(',', c1 + 1);
        if (c1 == std::string::npos || c2 == std::string::npos) {
          throw Error(path + ": malformed budget row: " + line);
        }
        budgets.push_back({line.substr(0, c1),
                           std::stoull(line.substr(c1 + 1, c2 - c1 - 1)),
                           std::stoull(line.substr(c2 + 1))});
      }
    }
    Emit(out_path_, csv ? TokenBudgetCsv(budgets) : TokenBudgetMarkdown(budgets));
  } else if (kind_ == "probe") {
    std::vector<ModelResult> rows;
    for (const auto &path : inputs_) {
      const auto j = json::parse(ReadFile(path));
      std::string name = j.value("model", std::string());
      if (name.empty()) name = std::filesystem::path(path).stem().string();
      rows.push_back({name, ProbeResultFromJson(j)});
    }
    const OverallMode mode =
        overall_ == "macro" ? OverallMode::kMacro : OverallMode::kMicro;
    Emit(out_path_, csv ? BreakdownCsv(rows, mode) : BreakdownMarkdown(rows, mode));
  } else {
    throw Error("unknown report kind: " + kind_);
  }
}

int Cli::Run() {
  CLI::App app{"Corpus engineering toolkit for MT-derived pretraining data",
               "mtcorpus"};
  app.require_subcommand(1);
  app.set_config("--config", "", "TOML configuration file (flat keys)");
  app.allow_config_extras(CLI::config_extras_mode::ignore);
  app.fallthrough();
  AddGlobalOptions(app);

  std::map<CLI::App *, void (Cli::*)()> handlers;
  auto sub = [&](const char *name, const char *help, void (Cli::*fn)()) {
    CLI::App *s = app.add_subcommand(name, help);
    handlers[s] = fn;
    return s;
  };

  auto *stats = sub("stats", "Per-dataset word statistics", &Cli::Stats);
  stats->add_option("--in", in_, "Corpus")->required();
  stats->add_option("--out", out_path_, "Output JSON");

  auto *compare = sub("compare", "Per-pair metrics for natural/simplified",
                      &Cli::Compare);
  compare->add_option("--natural", natural_, "Natural corpus")->required();
  compare->add_option("--simplified", simplified_, "Simplified corpus")
      ->required();
  compare->add_option("--natural-parses", natural_parses_, "CoNLL-U parses");
  compare->add_option("--simplified-parses", simplified_parses_,
                      "CoNLL-U parses");
  compare->add_flag("--embed", embed_, "Embed both sides via the endpoint");
  compare->add_option("--out", out_path_, "Metric records (.jsonl or .csv)");
  compare->add_option("--summary", summary_, "Cross-dataset stats JSON");

  auto *outliers = sub("outliers", "IQR outlier tagging", &Cli::Outliers);
  outliers->add_option("--in", in_, "Metric records JSONL")->required();
  outliers->add_option("--out", out_path_, "Tagged records JSONL");
  outliers->add_option("--summary", summary_, "Summary JSON");
  outliers->add_option("--metrics", metrics_, "Metrics to tag")->delimiter(',');
  outliers->add_flag("--apply-policy", apply_policy_,
                     "Clip FRE and drop flagged records");

  auto *fpre = sub("filter-pre", "Sentence length filter", &Cli::FilterPre);
  fpre->add_option("--in", in_, "Corpus")->required();
  fpre->add_option("--out", out_path_, "Kept corpus");
  fpre->add_option("--report", report_, "Drop report JSON");

  auto *translate = sub("translate", "Sentence-level translation",
                        &Cli::Translate);
  translate->add_option("--in", in_, "Corpus")->required();
  translate->add_option("--out", out_path_, "Translated sentences JSONL");
  translate->add_option("--source-out", source_out_, "Source sentences JSONL");

  auto *fpost = sub("filter-post", "Length-ratio filter after translation",
                    &Cli::FilterPost);
  fpost->add_option("--source", source_, "Source sentences JSONL")->required();
  fpost->add_option("--target", target_, "Translated sentences JSONL")
      ->required();
  fpost->add_option("--out", out_path_, "Kept translated sentences");
  fpost->add_option("--source-out", source_out_, "Kept source sentences");
  fpost->add_option("--report", report_, "Drop report JSON");

  auto *recon = sub("reconstruct", "Reassemble sentences into documents",
                    &Cli::Reconstruct);
  recon->add_option("--in", in_, "Sentences JSONL")->required();
  recon->add_option("--out", out_path_, "Corpus");
  recon->add_option("--order", order_, "Corpus whose id order to follow");

  auto *simplify = sub("simplify", "LLM simplification", &Cli::Simplify);
  simplify->add_option("--in", in_, "Corpus")->required();
  simplify->add_option("--out", out_path_, "Simplified corpus");
  simplify->add_option("--prompt", prompt_, "Prompt template file");
  simplify->add_flag("--similarity-check", similarity_check_,
                     "Flag outputs with cosine < 0.5");

  auto *train = sub("tok-train", "Train a byte-level BPE", &Cli::TokTrain);
  train->add_option("--in", inputs_, "Corpora")->required();
  train->add_option("--out-dir", out_path_, "Model directory")->required();

  auto *count = sub("tok-count", "Token budget", &Cli::TokCount);
  count->add_option("--model", model_dir_, "Model directory")->required();
  count->add_option("--mt", mt_, "MT-derived corpus");
  count->add_option("--native", native_, "Native corpus");
  count->add_option("--setup", setup_, "Setup name")->required();
  count->add_option("--out", out_path_, "Budget CSV");
  count->add_flag("--append", append_, "Append a row to an existing CSV");

  auto *pack = sub("pack", "Pack documents into fixed-length rows", &Cli::Pack);
  pack->add_option("--model", model_dir_, "Model directory")->required();
  pack->add_option("--in", in_, "Corpus")->required();
  pack->add_option("--out", out_path_, "Rows, one per line");

  auto *probe = sub("probe", "Minimal-pair evaluation", &Cli::Probe);
  probe->add_option("--pairs", pairs_, "Pairs JSONL")->required();
  probe->add_option("--out", out_path_, "Result JSON");
  probe->add_option("--markdown", markdown_, "Breakdown table");
  probe->add_option("--model-name", model_name_, "Row label");
  probe->add_flag("--length-normalize", length_normalize_,
                  "Compare per-word log-probabilities");
  probe->add_option("--phenomena", phenomena_, "Column order")->delimiter(',');
  probe->add_option("--overall", overall_, "micro | macro")
      ->check(CLI::IsMember({"micro", "macro"}));

  auto *balacc = sub("balacc", "Balanced accuracy over prediction files",
                     &Cli::Balacc);
  balacc->add_option("--pred", inputs_, "Prediction files, one per seed")
      ->required();
  balacc->add_option("--out", out_path_, "Result JSON");

  auto *report = sub("report", "Render report tables", &Cli::Report);
  report->add_option("--kind", kind_, "corpus | budget | probe")
      ->required()
      ->check(CLI::IsMember({"corpus", "budget", "probe"}));
  report->add_option("--in", inputs_, "Input files");
  report->add_option("--simplified-stats", simplified_stats_, "stats JSON");
  report->add_option("--natural-stats", natural_stats_, "stats JSON");
  report->add_option("--cross", cross_, "compare --summary JSON");
  report->add_option("--table", table_format_, "md | csv")
      ->check(CLI::IsMember({"md", "csv"}));
  report->add_option("--overall", overall_, "micro | macro")
      ->check(CLI::IsMember({"micro", "macro"}));
  report->add_option("--out", out_path_, "Output");

  std::vector<const char *> cargv;
  for (const auto &a : argv_) cargv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(cargv.size()), cargv.data());
  } catch (const CLI::CallForHelp &) {
    out_ << app.help();
    return 0;
  } catch (const CLI::CallForAllHelp &) {
    out_ << app.help("", CLI::AppFormatMode::All);
    return 0;
  } catch (const CLI::ParseError &e) {
    err_ << "mtcorpus: " << e.what() << "\n";
    CLI::App *target = &app;
    for (auto *s : app.get_subcommands()) target = s;
    err_ << target->help();
    return 2;
  }

  for (auto &[s, fn] : handlers) {
    if (!s->parsed()) continue;
    active_ = s;
    try {
      (this->*fn)();
    } catch (const std::exception &e) {
      std::string msg = e.what();
      for (auto &c : msg) {
        if (c == '\n') c = ' ';
      }
      err_ << "mtcorpus: " << s->get_name() << ": error: " << msg << "\n";
      return 1;
    }
  }
  return 0;
}

}  // namespace

int RunCli(const std::vector<std::string> &argv, const CliEnvironment &env) {
  Cli cli(env, argv.empty() ? std::vector<std::string>{"mtcorpus"} : argv);
  return cli.Run();
}

}  // namespace mtcorpus
