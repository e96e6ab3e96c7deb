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

// Acceptance checks. Prints one PASS/FAIL line per criterion and exits
// non-zero when any criterion fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "fakes.h"
#include "json.hpp"
#include "mtcorpus/bpe.h"
#include "mtcorpus/clients.h"
#include "mtcorpus/corpus.h"
#include "mtcorpus/error.h"
#include "mtcorpus/filters.h"
#include "mtcorpus/metrics.h"
#include "mtcorpus/outliers.h"
#include "mtcorpus/probe.h"
#include "mtcorpus/report.h"
#include "oracles.h"
#include "test_util.h"

using namespace mtcorpus;
using nlohmann::json;

namespace {

using Clock = std::chrono::steady_clock;

struct Check {
  bool ok = true;
  std::string detail;

  void Expect(bool cond, const std::string &what) {
    if (!cond && ok) detail = what;
    ok = ok && cond;
  }
};

int failures = 0;

void Run(const std::string &name, double limit_s, const std::function<Check()> &body) {
  const auto start = Clock::now();
  Check c;
  try {
    c = body();
  } catch (const std::exception &e) {
    c.ok = false;
    c.detail = std::string("exception: ") + e.what();
  }
  const double secs = std::chrono::duration<double>(Clock::now() - start).count();
  if (limit_s > 0 && secs > limit_s) {
    c.Expect(false, "took " + std::to_string(secs) + " s, limit " +
                        std::to_string(limit_s) + " s");
  }
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.2fs", secs);
  std::cout << (c.ok ? "PASS " : "FAIL ") << name << " [" << buf << "]";
  if (!c.detail.empty()) std::cout << " " << c.detail;
  std::cout << std::endl;
  if (!c.ok) ++failures;
}

std::string Fixed2(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.2f", v);
  return buf;
}

const std::vector<std::string> kWords = {
    "the", "cat", "sat", "on", "mat", "a", "dog", "ran", "far", "away",
    "river", "stone", "light", "under", "over", "big", "small", "red", "blue", "tree"};

std::string RandomWords(std::mt19937 &rng, std::size_t n, std::size_t vocab = 20) {
  std::uniform_int_distribution<std::size_t> pick(0, std::min(vocab, kWords.size()) - 1);
  std::string s;
  for (std::size_t i = 0; i < n; ++i) {
    if (i) s += ' ';
    s += kWords[pick(rng)];
  }
  return s;
}

std::string Capitalize(std::string s) {
  if (!s.empty()) s[0] = static_cast<char>(std::toupper(static_cast<unsigned char>(s[0])));
  return s;
}

std::string RandomSentence(std::mt19937 &rng, std::size_t min_words, std::size_t max_words) {
  std::uniform_int_distribution<std::size_t> len(min_words, max_words);
  return Capitalize(RandomWords(rng, len(rng))) + ".";
}

std::vector<std::string> SplitWs(const std::string &s) {
  std::istringstream in(s);
  std::vector<std::string> out;
  for (std::string w; in >> w;) out.push_back(w);
  return out;
}

long StatusKb(const std::string &key) {
  std::ifstream in("/proc/self/status");
  for (std::string line; std::getline(in, line);) {
    if (line.rfind(key + ":", 0) == 0) return std::stol(line.substr(key.size() + 1));
  }
  return -1;
}

// Resets the peak-RSS counter so the next reading covers only what follows.
bool ResetPeakRss() {
  std::ofstream out("/proc/self/clear_refs");
  out << "5";
  out.flush();
  return static_cast<bool>(out);
}

// ---------------------------------------------------------------------------

Check TtrRelation() {
  Check c;
  const std::string a = Fixed2(TypeTokenRatio(9'560'000, 3'450'000'000ULL));
  const std::string b = Fixed2(TypeTokenRatio(12'700'000, 3'720'000'000ULL));
  c.Expect(a == "0.28", "simplified ttr " + a);
  c.Expect(b == "0.34", "natural ttr " + b);
  c.detail = c.ok ? "(" + a + "%, " + b + "%)" : c.detail;
  return c;
}

Check BucketPartition() {
  Check c;
  std::mt19937 rng(1);
  std::vector<ParallelPair> pairs, same;
  for (int i = 0; i < 10000; ++i) {
    const std::string id = std::to_string(i);
    const std::string nat = RandomWords(rng, 3 + i % 12, 8);
    std::string simp;
    switch (i % 4) {
      case 0: simp = nat; break;
      case 1: simp = RandomWords(rng, 3 + i % 7, 8); break;
      case 2: simp = nat.substr(0, nat.size() / 2) + " " + RandomWords(rng, 4, 8); break;
      default: simp = "zzz qqq xxx"; break;
    }
    pairs.push_back({id, {id, nat, {}}, {id, simp, {}}});
    same.push_back({id, {id, nat, {}}, {id, nat, {}}});
  }
  const auto s = ComputeCrossDatasetStats(pairs);
  const double sum =
      s.pct_exact_match + s.pct_high + s.pct_medium + s.pct_low + s.pct_exact_mismatch;
  c.Expect(std::fabs(sum - 100.0) <= 1e-9, "bucket sum " + std::to_string(sum));
  c.Expect(s.pct_exact_match > 0 && s.pct_exact_mismatch > 0 && s.pct_low + s.pct_medium > 0,
           "synthetic corpus did not populate the buckets");
  const auto t = ComputeCrossDatasetStats(same);
  c.Expect(t.pct_exact_match == 100.0, "identical pairs exact_match " +
                                           std::to_string(t.pct_exact_match));
  return c;
}

Check RougeOracle() {
  Check c;
  std::mt19937 rng(2);
  std::uniform_int_distribution<std::size_t> len(0, 10), vocab(2, 8);
  for (int t = 0; t < 1000 && c.ok; ++t) {
    const std::size_t v = vocab(rng);
    const std::string a = RandomWords(rng, len(rng), v);
    const std::string b = RandomWords(rng, len(rng), v);
    const auto aw = oracle::AsciiWords(a), bw = oracle::AsciiWords(b);
    if (aw.empty() || bw.empty()) {
      const double want = aw == bw ? 1.0 : 0.0;
      c.Expect(Rouge2(a, b) == want && RougeL(a, b) == want, "empty side scored wrong");
      continue;
    }
    // Both sides compute the same rational; allow only representation error.
    const double r2 = Rouge2(a, b), o2 = oracle::Rouge2(aw, bw);
    const double rl = RougeL(a, b), ol = oracle::RougeL(aw, bw);
    c.Expect(std::fabs(r2 - o2) <= 1e-12, "rouge2 mismatch on '" + a + "' / '" + b + "'");
    c.Expect(std::fabs(rl - ol) <= 1e-12, "rougeL mismatch on '" + a + "' / '" + b + "'");
    c.Expect(LcsLength(aw, bw) == oracle::BruteLcs(aw, bw), "lcs mismatch");
  }
  return c;
}

Check IqrOracle() {
  Check c;
  std::mt19937 rng(3);
  std::uniform_int_distribution<std::size_t> size(1, 1000);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::uniform_int_distribution<int> small(-5, 5);
  for (int t = 0; t < 1000 && c.ok; ++t) {
    const std::size_t n = size(rng);
    std::vector<double> v(n);
    for (auto &x : v) {
      // Mix continuous values, heavy ties and occasional far outliers.
      switch (t % 3) {
        case 0: x = normal(rng); break;
        case 1: x = small(rng); break;
        default: x = normal(rng) * (rng() % 50 == 0 ? 40.0 : 1.0); break;
      }
    }
    const Quartiles q = ComputeQuartiles(v);
    const double o1 = oracle::Quantile(v, 0.25), om = oracle::Quantile(v, 0.5),
                 o3 = oracle::Quantile(v, 0.75);
    c.Expect(q.q1 == o1 && q.median == om && q.q3 == o3,
             "quartiles differ at sample " + std::to_string(t));

    std::vector<MetricRecord> recs(n);
    for (std::size_t i = 0; i < n; ++i) {
      recs[i].pair_id = std::to_string(i);
      recs[i].compression = v[i];
    }
    const std::vector<OutlierMetric> m = {OutlierMetric::kCompression};
    auto loose = recs;
    TagOutliers(recs, m, 3.0);
    TagOutliers(loose, m, 1.5);
    for (double k : {3.0, 1.5}) {
      const auto &tagged = k == 3.0 ? recs : loose;
      const IqrBounds b = ComputeIqrBounds(v, k);
      const double lo = o1 - k * (o3 - o1), hi = o3 + k * (o3 - o1);
      c.Expect(b.lower == lo && b.upper == hi, "bounds differ at sample " + std::to_string(t));
      for (std::size_t i = 0; i < n; ++i) {
        const bool expect = v[i] < lo || v[i] > hi;
        c.Expect(tagged[i].outlier_flags.count("compression") == (expect ? 1u : 0u),
                 "flag differs at sample " + std::to_string(t));
      }
    }
    for (std::size_t i = 0; i < n; ++i) {
      if (recs[i].outlier_flags.count("compression")) {
        c.Expect(loose[i].outlier_flags.count("compression") == 1,
                 "k=3 flag missing at k=1.5");
      }
    }
  }
  return c;
}

Check FreClipping() {
  Check c;
  c.Expect(ClipFre(-15.65) == 0.0, "-15.65 not clipped to 0");
  c.Expect(ClipFre(112.09) == 100.0, "112.09 not clipped to 100");
  c.Expect(ClipFre(55.5) == 55.5, "in-range value changed");

  std::mt19937 rng(4);
  const std::vector<std::string> texts = {
      "Go. Run. Sit. Eat.",
      "Notwithstanding considerable institutional responsibilities, "
      "organizational representatives characteristically underestimated "
      "international administrative complications.",
      "The cat sat on the mat."};
  std::vector<MetricRecord> recs;
  bool saw_low = false, saw_high = false;
  for (int i = 0; i < 300; ++i) {
    const std::string a = texts[i % texts.size()];
    const std::string b = i % 5 == 0 ? texts[(i + 1) % texts.size()] : RandomSentence(rng, 1, 30);
    MetricRecord r = ComputeMetrics({std::to_string(i), {"", a, {}}, {"", b, {}}});
    saw_low = saw_low || r.fre_a < 0 || r.fre_b < 0;
    saw_high = saw_high || r.fre_a > 100 || r.fre_b > 100;
    recs.push_back(r);
  }
  c.Expect(saw_low && saw_high, "fixture lacks out-of-range raw FRE values");
  std::vector<OutlierMetric> all = AllOutlierMetrics();
  TagOutliers(recs, all);
  const auto kept = ApplyPlotPolicy(recs);
  c.Expect(!kept.empty(), "policy dropped everything");
  for (const auto &r : kept) {
    c.Expect(r.fre_a >= 0 && r.fre_a <= 100 && r.fre_b >= 0 && r.fre_b <= 100,
             "emitted FRE outside [0, 100]");
  }
  return c;
}

Check Filters() {
  Check c;
  std::mt19937 rng(5);
  std::vector<Document> docs;
  std::set<std::string> planted_short;
  for (int i = 0; i < 2000; ++i) {
    const std::string id = "d" + std::to_string(i);
    std::string text;
    const int sentences = 1 + i % 4;
    for (int s = 0; s < sentences; ++s) {
      if (s) text += ' ';
      text += RandomSentence(rng, 3, 40);
    }
    if (i % 37 == 0) {
      text += " Big tree.";
      planted_short.insert(id);
    }
    docs.push_back({id, text, {}});
  }
  const LengthBounds bounds = ProfileBounds("id");
  c.Expect(bounds.min_tokens == 3 && bounds.max_tokens == 250, "id profile bounds");
  const auto pre = PreMtFilter(docs, bounds);
  std::set<std::string> dropped(pre.report.dropped_ids.begin(), pre.report.dropped_ids.end());
  c.Expect(dropped == planted_short, "pre-MT filter dropped " +
                                         std::to_string(dropped.size()) + " docs, planted " +
                                         std::to_string(planted_short.size()));
  c.Expect(pre.kept.size() + dropped.size() == docs.size(), "kept + dropped != input");
  const auto pre2 = PreMtFilter(pre.kept, bounds);
  c.Expect(pre2.kept == pre.kept && pre2.report.dropped == 0, "pre-MT filter not idempotent");

  auto source = ToSentenceRecords(pre.kept);
  std::vector<SentenceRecord> target = source;
  std::set<std::string> planted_ratio;
  std::string boundary_id;
  for (std::size_t i = 0; i < source.size(); ++i) {
    const SentenceRecord s = source[i];
    const std::size_t n = SplitWs(s.text).size();
    if (s.index != 0) continue;
    const std::size_t doc_no = std::stoul(s.doc_id.substr(1));
    if (doc_no % 41 == 1) {
      // Replace the pair with exactly 10 source and 21 target tokens.
      target[i].text = RandomWords(rng, 21);
      source[i].text = RandomWords(rng, 10);
      planted_ratio.insert(s.doc_id);
    } else if (boundary_id.empty() && n >= 3) {
      target[i].text = RandomWords(rng, 2 * n);
      boundary_id = s.doc_id;
    }
  }
  c.Expect(!planted_short.empty() && !planted_ratio.empty() && !boundary_id.empty(),
           "fixture has no planted violations");
  const auto post = PostMtFilter(source, target, 2.0);
  std::set<std::string> pdropped(post.report.dropped_ids.begin(), post.report.dropped_ids.end());
  c.Expect(pdropped == planted_ratio, "post-MT filter dropped " +
                                          std::to_string(pdropped.size()) + " docs, planted " +
                                          std::to_string(planted_ratio.size()));
  c.Expect(std::any_of(post.kept_source.begin(), post.kept_source.end(),
                       [&](const SentenceRecord &r) { return r.doc_id == boundary_id; }),
           "ratio 2.0 document was dropped");
  const auto post2 = PostMtFilter(post.kept_source, post.kept_target, 2.0);
  c.Expect(post2.kept_source == post.kept_source && post2.kept_target == post.kept_target &&
               post2.report.dropped == 0,
           "post-MT filter not idempotent");
  return c;
}

Check Reconstruction() {
  Check c;
  std::mt19937 rng(6);
  std::vector<Document> docs;
  for (int i = 0; i < 1000; ++i) {
    std::string text;
    const int sentences = 1 + i % 6;
    for (int s = 0; s < sentences; ++s) {
      if (s) text += (s % 2 ? " " : "\n  ");
      text += RandomSentence(rng, 1, 20);
      if (s % 3 == 2) text.back() = '?';
    }
    docs.push_back({"doc" + std::to_string(i), text, {}});
  }
  const auto records = ToSentenceRecords(docs);
  TransformRequest req;
  req.kind = TransformKind::kTranslate;
  for (const auto &r : records) {
    req.items.push_back({r.doc_id + "#" + std::to_string(r.index), r.text});
  }
  ClientOptions opts;
  opts.initial_backoff = std::chrono::milliseconds(0);
  TransformClient client(std::make_shared<fakes::EchoTransport>(), opts);
  const auto translated = client.Translate(req);
  std::vector<SentenceRecord> out = records;
  for (std::size_t i = 0; i < out.size(); ++i) out[i].text = translated[i].second;

  std::vector<std::string> order;
  for (const auto &d : docs) order.push_back(d.doc_id);
  const auto rebuilt = ReconstructDocuments(out, order);
  c.Expect(rebuilt.size() == docs.size(), "document count changed");
  for (std::size_t i = 0; i < std::min(rebuilt.size(), docs.size()); ++i) {
    c.Expect(rebuilt[i].doc_id == docs[i].doc_id &&
                 SplitWs(rebuilt[i].text) == SplitWs(docs[i].text),
             "token sequence differs for " + docs[i].doc_id);
  }

  // Remove one non-final sentence from a multi-sentence document.
  std::vector<std::size_t> candidates;
  for (std::size_t i = 0; i + 1 < out.size(); ++i) {
    if (out[i + 1].doc_id == out[i].doc_id) candidates.push_back(i);
  }
  for (int trial = 0; trial < 20; ++trial) {
    const std::size_t victim = candidates[rng() % candidates.size()];
    auto damaged = out;
    const std::string expect = "doc " + damaged[victim].doc_id + " missing sentence " +
                               std::to_string(damaged[victim].index);
    damaged.erase(damaged.begin() + static_cast<std::ptrdiff_t>(victim));
    std::shuffle(damaged.begin(), damaged.end(), rng);
    try {
      ReconstructDocuments(damaged);
      c.Expect(false, "deletion not detected: " + expect);
    } catch (const Error &e) {
      c.Expect(std::string(e.what()).find(expect) != std::string::npos,
               "wrong diagnostic '" + std::string(e.what()) + "', expected '" + expect + "'");
    }
  }
  return c;
}

void AppendCodePoint(std::string &s, char32_t cp) {
  if (cp < 0x80) {
    s += static_cast<char>(cp);
  } else if (cp < 0x800) {
    s += static_cast<char>(0xC0 | (cp >> 6));
    s += static_cast<char>(0x80 | (cp & 0x3F));
  } else if (cp < 0x10000) {
    s += static_cast<char>(0xE0 | (cp >> 12));
    s += static_cast<char>(0x80 | ((cp >> 6) & 0x3F));
    s += static_cast<char>(0x80 | (cp & 0x3F));
  } else {
    s += static_cast<char>(0xF0 | (cp >> 18));
    s += static_cast<char>(0x80 | ((cp >> 12) & 0x3F));
    s += static_cast<char>(0x80 | ((cp >> 6) & 0x3F));
    s += static_cast<char>(0x80 | (cp & 0x3F));
  }
}

std::string FuzzUtf8(std::mt19937 &rng, std::size_t max_len) {
  static const std::vector<std::pair<char32_t, char32_t>> kRanges = {
      {0x20, 0x7E}, {0x09, 0x0D}, {0xA0, 0x24F}, {0x0B82, 0x0BCD},
      {0x0B82, 0x0BCD}, {0x0900, 0x097F}, {0x4E00, 0x4FFF}, {0x1F600, 0x1F64F}};
  std::uniform_int_distribution<std::size_t> len(0, max_len), range(0, kRanges.size() - 1);
  std::string s;
  const std::size_t n = len(rng);
  for (std::size_t i = 0; i < n; ++i) {
    const auto [lo, hi] = kRanges[range(rng)];
    AppendCodePoint(s, std::uniform_int_distribution<char32_t>(lo, hi)(rng));
  }
  return s;
}

Check Bpe() {
  Check c;
  std::mt19937 rng(7);
  testing_util::TempDir dir;

  std::vector<Document> corpus;
  for (int i = 0; i < 400; ++i) {
    std::string text = RandomSentence(rng, 5, 25);
    text += " \xE0\xAE\xA4\xE0\xAE\xAE\xE0\xAE\xBF\xE0\xAE\xB4\xE0\xAF\x8D ";  // Tamil word
    text += FuzzUtf8(rng, 20);
    corpus.push_back({std::to_string(i), text, {}});
  }
  const BpeModel m1 = TrainBpe(corpus, {600});
  const BpeModel m2 = TrainBpe(corpus, {600});
  m1.Save(dir.File("a"));
  m2.Save(dir.File("b"));
  c.Expect(ReadFile(dir.File("a/merges.txt")) == ReadFile(dir.File("b/merges.txt")) &&
               ReadFile(dir.File("a/vocab.json")) == ReadFile(dir.File("b/vocab.json")),
           "vocab files differ between runs");
  const BpeModel loaded = BpeModel::Load(dir.File("a"));
  c.Expect(loaded.MergesText() == m1.MergesText(), "reload changed the model");

  for (int i = 0; i < 10000 && c.ok; ++i) {
    const std::string s = FuzzUtf8(rng, 40);
    const auto ids = loaded.Encode(s);
    c.Expect(loaded.Decode(ids) == s, "round trip failed at fuzz case " + std::to_string(i));
  }

  for (int t = 0; t < 12 && c.ok; ++t) {
    std::vector<std::string> texts;
    std::size_t bytes = 0;
    const std::size_t budget = 500 + rng() % 9500;
    while (bytes < budget) {
      std::string s = t % 3 == 0 ? FuzzUtf8(rng, 30) : RandomSentence(rng, 1, 12);
      if (bytes + s.size() > 10000) break;
      bytes += s.size();
      texts.push_back(std::move(s));
    }
    const std::size_t vocab = 257 + rng() % 44;
    BpeTrainer trainer;
    for (const auto &s : texts) trainer.AddText(s);
    const BpeModel m = trainer.Train({vocab});
    std::vector<std::pair<std::string, std::string>> got;
    for (auto [l, r] : m.merges()) got.emplace_back(m.token_bytes(l), m.token_bytes(r));
    c.Expect(got == oracle::NaiveBpe(texts, vocab),
             "trainer differs from naive oracle (corpus " + std::to_string(t) + ")");
  }

  std::vector<std::vector<TokenId>> docs;
  std::uniform_int_distribution<int> dlen(0, 3000);
  for (int i = 0; i < 200; ++i) {
    docs.push_back(std::vector<TokenId>(static_cast<std::size_t>(dlen(rng)), i % 256));
  }
  const auto rows = PackSequences(docs, loaded.pad_id(), 1024);
  std::size_t expected_ids = 0;
  for (const auto &d : docs) expected_ids += d.size() + 1;
  c.Expect(rows.size() == (expected_ids + 1023) / 1024, "row count");
  for (const auto &r : rows) c.Expect(r.size() == 1024, "row not 1024 ids");
  return c;
}

std::vector<MinimalPair> MakePairs(const std::vector<std::pair<std::string, int>> &sizes) {
  std::vector<MinimalPair> pairs;
  int id = 0;
  for (const auto &[name, n] : sizes) {
    for (int i = 0; i < n; ++i, ++id) {
      pairs.push_back({"p" + std::to_string(id), "good " + std::to_string(id),
                       "bad " + std::to_string(id), name, "id"});
    }
  }
  return pairs;
}

Check Probe() {
  Check c;
  const auto pairs = MakePairs({{"NPIs", 20}, {"Arg.", 160}, {"Fill-gap", 60}, {"Morph.", 140}});
  auto by_prefix = [](double good, double bad) {
    return [good, bad](const std::vector<std::string> &s) {
      std::vector<double> out;
      for (const auto &x : s) out.push_back(x.rfind("good", 0) == 0 ? good : bad);
      return out;
    };
  };
  const auto oracle_r = EvaluatePairs(pairs, by_prefix(-1, -2));
  c.Expect(oracle_r.micro_accuracy == 100.0, "oracle scorer not 100%");
  const auto inverted = EvaluatePairs(pairs, by_prefix(-2, -1));
  c.Expect(inverted.micro_accuracy == 0.0, "inverted scorer not 0%");
  const auto constant = EvaluatePairs(pairs, by_prefix(-3, -3));
  c.Expect(constant.micro_accuracy == 0.0 && constant.ties == pairs.size(),
           "constant scorer: " + std::to_string(constant.ties) + " ties");

  // Scripted scorer: correctness depends on the pair number.
  auto scripted = [](const std::vector<std::string> &s) {
    std::vector<double> out;
    for (const auto &x : s) {
      const int id = std::stoi(x.substr(x.find(' ') + 1));
      const bool good = x.rfind("good", 0) == 0;
      const bool right = (id * 7) % 10 < 6;
      out.push_back(good == right ? -1.0 - id * 0.01 : -5.0 - id * 0.01);
    }
    return out;
  };
  const auto r = EvaluatePairs(pairs, scripted);
  std::size_t correct = 0;
  for (std::size_t i = 0; i < pairs.size(); ++i) correct += (i * 7) % 10 < 6;
  std::size_t sum_correct = 0, sum_n = 0;
  for (const auto &p : r.phenomena) {
    sum_correct += p.correct;
    sum_n += p.n;
  }
  c.Expect(r.phenomena.size() == 4 && r.phenomena[0].n == 20 && r.phenomena[1].n == 160 &&
               r.phenomena[2].n == 60 && r.phenomena[3].n == 140,
           "fixture sizes");
  c.Expect(sum_n == 380 && sum_correct == correct && r.correct == correct,
           "per-phenomenon tallies");
  c.Expect(std::fabs(r.micro_accuracy - 100.0 * sum_correct / sum_n) < 1e-12,
           "micro != sum(correct)/sum(n)");

  auto transformed = [&](const std::vector<std::string> &s) {
    auto v = scripted(s);
    for (auto &x : v) x = 2 * x - 7;
    return v;
  };
  const auto rt = EvaluatePairs(pairs, transformed);
  c.Expect(rt.correct == r.correct && rt.micro_accuracy == r.micro_accuracy,
           "accuracy changed under x -> 2x - 7");

  const auto many = MakePairs({{"all", 10000}});
  std::mt19937 rng(8);
  std::normal_distribution<double> noise(-20.0, 5.0);
  auto random_scorer = [&](const std::vector<std::string> &s) {
    std::vector<double> out;
    for (std::size_t i = 0; i < s.size(); ++i) out.push_back(noise(rng));
    return out;
  };
  const auto rr = EvaluatePairs(many, random_scorer);
  c.Expect(std::fabs(rr.micro_accuracy - 50.0) <= 3.0,
           "random scorer accuracy " + std::to_string(rr.micro_accuracy));
  return c;
}

Check BalancedAccuracyCheck() {
  Check c;
  std::mt19937 rng(9);
  for (int t = 0; t < 200 && c.ok; ++t) {
    const int k = 2 + static_cast<int>(rng() % 6);
    std::vector<std::vector<int>> cm(k, std::vector<int>(k));
    std::vector<Prediction> preds;
    int id = 0;
    for (int g = 0; g < k; ++g) {
      for (int p = 0; p < k; ++p) {
        cm[g][p] = static_cast<int>(rng() % 30) + (p == 0 ? 1 : 0);
        for (int i = 0; i < cm[g][p]; ++i) {
          preds.push_back({std::to_string(id++), "c" + std::to_string(g), "c" + std::to_string(p)});
        }
      }
    }
    double brute = 0;
    for (int g = 0; g < k; ++g) {
      int row = 0;
      for (int p = 0; p < k; ++p) row += cm[g][p];
      brute += static_cast<double>(cm[g][g]) / row;
    }
    brute /= k;
    c.Expect(std::fabs(BalancedAccuracy(preds) - brute) < 1e-12,
             "matrix " + std::to_string(t) + " differs from brute force");
  }
  for (int k = 2; k <= 10; ++k) {
    std::vector<Prediction> preds;
    for (int i = 0; i < 50 * k; ++i) {
      preds.push_back({std::to_string(i), "c" + std::to_string(i % k), "c0"});
    }
    c.Expect(std::fabs(BalancedAccuracy(preds) - 1.0 / k) < 1e-12,
             "constant predictor on " + std::to_string(k) + " classes");
  }
  return c;
}

Check Throughput() {
  Check c;
  testing_util::TempDir dir;
  const std::string path = dir.File("big.jsonl");
  {
    std::mt19937 rng(10);
    // 200k word types drawn with a skewed distribution.
    std::vector<std::string> vocab;
    for (int i = 0; i < 200000; ++i) {
      std::string w;
      for (int x = i + 1; x > 0; x /= 23) w += static_cast<char>('a' + x % 23);
      vocab.push_back(w);
    }
    std::ofstream out(path, std::ios::binary);
    std::uint64_t written = 0;
    std::string line;
    int doc = 0;
    while (written < 100ull * 1000 * 1000) {
      line = "{\"id\":\"" + std::to_string(doc++) + "\",\"text\":\"";
      for (int w = 0; w < 150; ++w) {
        const double u = std::uniform_real_distribution<double>(0, 1)(rng);
        line += vocab[static_cast<std::size_t>(u * u * u * vocab.size())];
        line += w % 17 == 16 ? ". " : " ";
      }
      line += "\"}\n";
      out << line;
      written += line.size();
    }
  }
  const auto bytes = std::filesystem::file_size(path);
  const bool reset = ResetPeakRss();
  const long rss_before = StatusKb("VmRSS");
  const auto start = Clock::now();
  CorpusReader reader(path, CorpusFormat::kJsonl);
  const PerDatasetStats s = ComputePerDatasetStats(reader);
  const double secs = std::chrono::duration<double>(Clock::now() - start).count();
  const long grown_mb = (StatusKb("VmHWM") - rss_before) / 1024;
  c.Expect(reset && rss_before > 0, "cannot measure peak RSS");
  c.Expect(secs <= 60.0, "stats took " + std::to_string(secs) + " s");
  c.Expect(s.types <= 200000 && s.total_words > 0, "implausible counts");
  // The type table for 200k short words fits well under 64 MB; a reader that
  // buffered the file would need at least its size.
  c.Expect(grown_mb < 64, "peak RSS grew by " + std::to_string(grown_mb) + " MB");
  c.detail = c.ok ? "(" + std::to_string(bytes / 1000000) + " MB in " + Fixed2(secs) +
                        " s, rss +" + std::to_string(grown_mb) + " MB)"
                  : c.detail;
  return c;
}

Check WarmCache() {
  Check c;
  testing_util::TempDir dir;
  std::mt19937 rng(11);
  TransformRequest req;
  for (int i = 0; i < 500; ++i) {
    req.items.push_back({"item" + std::to_string(i), RandomSentence(rng, 3, 25)});
  }
  auto run = [&](fakes::EchoTransport &fake_ref, std::shared_ptr<Transport> t) {
    (void)fake_ref;
    ClientOptions opts;
    opts.cache_root = dir.File("cache");
    opts.initial_backoff = std::chrono::milliseconds(0);
    TransformClient client(t, opts);
    TransformRequest tr = req;
    tr.kind = TransformKind::kTranslate;
    json out = json::array();
    for (const auto &[id, text] : client.Translate(tr)) out.push_back({id, text});
    TransformRequest sr = req;
    sr.kind = TransformKind::kSimplify;
    SimplifyOptions so;
    so.similarity_check = true;
    for (const auto &r : client.Simplify(sr, DefaultSimplifyPrompt(), so)) {
      out.push_back({r.item_id, r.text, r.degenerate, r.cosine.value_or(-1)});
    }
    return out.dump();
  };
  auto cold = std::make_shared<fakes::EchoTransport>();
  cold->translate = [](const std::string &s) { return "[" + s + "]"; };
  const std::string first = run(*cold, cold);
  c.Expect(cold->calls > 0, "cold run made no calls");
  auto warm = std::make_shared<fakes::EchoTransport>();
  warm->translate = cold->translate;
  const std::string second = run(*warm, warm);
  c.Expect(warm->calls == 0, "warm run made " + std::to_string(warm->calls.load()) + " calls");
  c.Expect(first == second, "outputs differ between runs");
  return c;
}

}  // namespace

int main() {
  Run("ttr_relation", 1, TtrRelation);
  Run("bucket_partition", 5, BucketPartition);
  Run("rouge_oracle", 10, RougeOracle);
  Run("iqr_oracle", 30, IqrOracle);
  Run("fre_clipping", 0, FreClipping);
  Run("filters", 5, Filters);
  Run("reconstruction", 0, Reconstruction);
  Run("bpe", 60, Bpe);
  Run("probe", 10, Probe);
  Run("balanced_accuracy", 0, BalancedAccuracyCheck);
  Run("throughput", 0, Throughput);
  Run("warm_cache", 0, WarmCache);
  std::cout << (failures == 0 ? "ALL PASS" : std::to_string(failures) + " FAILED") << std::endl;
  return failures == 0 ? 0 : 1;
}
