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

#include "mtcorpus/metrics.h"

#include <cmath>
#include <numeric>
#include <random>
#include <sstream>

#include "doctest.h"
#include "mtcorpus/conllu.h"
#include "mtcorpus/error.h"
#include "oracles.h"

using namespace mtcorpus;
using Words = std::vector<std::string>;

namespace {

std::string RandomText(std::mt19937 &rng, int max_len, int vocab) {
  static const char *kWords[] = {"a", "b", "c", "d", "e", "f", "g", "h"};
  const int len = static_cast<int>(rng() % (max_len + 1));
  std::string out;
  for (int i = 0; i < len; ++i) {
    if (i) out += ' ';
    out += kWords[rng() % vocab];
  }
  return out;
}

// Independent syllable rule: vowel groups, trailing silent e, at least one.
int RefSyllables(const std::string &w) {
  auto vowel = [](char c) { return std::string("aeiouy").find(c) != std::string::npos; };
  int n = 0;
  for (std::size_t i = 0; i < w.size(); ++i) {
    if (vowel(w[i]) && (i == 0 || !vowel(w[i - 1]))) ++n;
  }
  if (n > 1 && w.back() == 'e') --n;
  return n < 1 ? 1 : n;
}

double RefFre(const std::vector<std::string> &sentences) {
  std::string text;
  for (const auto &s : sentences) text += (text.empty() ? "" : " ") + s;
  const auto words = oracle::AsciiWords(text);
  double syll = 0;
  for (const auto &w : words) syll += RefSyllables(w);
  const double n = static_cast<double>(words.size());
  return 206.835 - 1.015 * n / static_cast<double>(sentences.size()) -
         84.6 * syll / n;
}

ParsedSentence Chain(int n) {
  ParsedSentence s;
  for (int i = 0; i < n; ++i) {
    s.tokens.push_back("w" + std::to_string(i));
    s.heads.push_back(i - 1);
  }
  return s;
}

}  // namespace

TEST_CASE("word_tokenize") {
  CHECK(WordTokenize("The cat sat.") == Words{"the", "cat", "sat"});
  CHECK(WordTokenize("").empty());
  CHECK(WordTokenize("don't stop—now") == Words{"don't", "stop—now"});
  CHECK(WordTokenize("  \"Hello,\"   world!! ... ") == Words{"hello", "world"});
  CHECK(WordTokenize("ÉCOLE Ünter") == Words{"école", "ünter"});
  CHECK(WordTokenize("ПРИВЕТ мир") == Words{"привет", "мир"});
  CHECK(WordTokenize("தமிழ் மொழி.") == Words{"தமிழ்", "மொழி"});
  CHECK(CountWords("one two  three") == 3);
}

TEST_CASE("ttr relation on published counts") {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", TypeTokenRatio(9'560'000, 3'450'000'000ULL));
  CHECK(std::string(buf) == "0.28");
  std::snprintf(buf, sizeof buf, "%.2f", TypeTokenRatio(12'700'000, 3'720'000'000ULL));
  CHECK(std::string(buf) == "0.34");
  CHECK(TypeTokenRatio(3, 4) * 4 == 300.0);
}

TEST_CASE("per-dataset stats") {
  std::vector<Document> ten = {{"a", "word word word word word", {}},
                               {"b", "word word word word word", {}}};
  auto s = ComputePerDatasetStats(ten);
  CHECK(s.total_words == 10);
  CHECK(s.types == 1);
  CHECK(s.ttr == doctest::Approx(10.0));
  CHECK(s.unigram_entropy == 0.0);

  std::vector<Document> ab = {{"x", "a b a b", {}}};
  CHECK(ComputePerDatasetStats(ab).unigram_entropy == 1.0);

  std::vector<Document> empty = {{"x", "   ", {}}};
  CHECK_THROWS_WITH_AS(ComputePerDatasetStats(empty), "no tokens", Error);

  std::istringstream in("{\"id\":\"1\",\"text\":\"A b\"}\n{\"id\":\"2\",\"text\":\"a c\"}\n");
  CorpusReader reader(in, CorpusFormat::kJsonl);
  s = ComputePerDatasetStats(reader);
  CHECK(s.total_words == 4);
  CHECK(s.types == 3);
  CHECK(s.ttr == doctest::Approx(75.0));
}

TEST_CASE("word counters merge associatively") {
  WordCounter a, b, whole;
  a.AddText("x y z x");
  b.AddText("y y w");
  whole.AddText("x y z x y y w");
  a.Merge(b);
  CHECK(a.table() == whole.table());
  CHECK(a.total_words() == whole.total_words());
}

TEST_CASE("unigram entropy") {
  CHECK(UnigramEntropy(std::map<std::string, std::uint64_t>{
            {"a", 1}, {"b", 1}, {"c", 1}, {"d", 1}}) == doctest::Approx(2.0));
  CHECK(UnigramEntropy(std::map<std::string, std::uint64_t>{{"a", 3}, {"b", 1}}) ==
        doctest::Approx(-(0.75 * std::log2(0.75) + 0.25 * std::log2(0.25))));
  CHECK(std::abs(UnigramEntropy(std::map<std::string, std::uint64_t>{
                     {"a", 3}, {"b", 1}}) - 0.811278) < 1e-6);
  CHECK(UnigramEntropy(std::map<std::string, std::uint64_t>{{"a", 7}}) == 0.0);
  std::vector<std::uint64_t> with_zero = {0, 2, 2};
  CHECK(UnigramEntropy(with_zero) == doctest::Approx(1.0));
  std::vector<std::uint64_t> zeros = {0, 0};
  CHECK_THROWS_AS(UnigramEntropy(zeros), Error);

  std::mt19937 rng(3);
  for (int t = 0; t < 200; ++t) {
    std::vector<std::uint64_t> c(1 + rng() % 20);
    for (auto &x : c) x = 1 + rng() % 50;
    const double h = UnigramEntropy(c);
    CHECK(h >= 0.0);
    CHECK(h <= std::log2(static_cast<double>(c.size())) + 1e-12);
  }
}

TEST_CASE("flesch reading ease") {
  CHECK(std::abs(FleschReadingEase("Go.") - 121.22) < 0.01);
  const std::string t = "The committee deliberated extensively. Nobody left early.";
  CHECK(FleschReadingEase(t + " " + t) == doctest::Approx(FleschReadingEase(t)));
  CHECK_THROWS_AS(FleschReadingEase("  ... "), Error);

  const std::vector<std::vector<std::string>> suite = {
      {"The cat sat on the mat."},
      {"Go home.", "It is late."},
      {"Photosynthesis converts light into chemical energy."},
      {"She sells sea shells.", "They are pretty.", "We like them."},
      {"International cooperation remains fundamentally important today."},
      {"A dog ran.", "The boy laughed loudly at the silly dog."},
      {"Parliament adopted the resolution unanimously yesterday."},
      {"I am here.", "You are there."},
      {"Complicated sentences containing numerous polysyllabic words reduce "
       "readability considerably."},
      {"Rain fell.", "Wind blew.", "Leaves moved.", "Birds hid."},
  };
  for (const auto &sentences : suite) {
    std::string text;
    for (const auto &s : sentences) text += (text.empty() ? "" : " ") + s;
    CHECK(std::abs(FleschReadingEase(text) - RefFre(sentences)) <= 0.5);
  }
}

TEST_CASE("clip_fre") {
  CHECK(ClipFre(-15.65) == 0.0);
  CHECK(ClipFre(112.09) == 100.0);
  CHECK(ClipFre(55.0) == 55.0);
  CHECK_THROWS_AS(ClipFre(std::nan("")), Error);
}

TEST_CASE("compression level and split difference") {
  CHECK(CompressionLevel("a b c", "a b c") == 1.0);
  CHECK(CompressionLevel("one two three four five six seven eight nine ten",
                         "one two three four five six seven eight") == 0.8);
  CHECK_THROWS_AS(CompressionLevel("", "x"), Error);
  CHECK(SentenceSplitDifference("It rained.", "It rained.") == 0);
  CHECK(SentenceSplitDifference("It rained and we left.",
                                "It rained. We left.") == 1);

  std::mt19937 rng(5);
  for (int t = 0; t < 50; ++t) {
    const std::string a = "z " + RandomText(rng, 12, 8);
    const std::string b = RandomText(rng, 12, 8);
    CHECK(CompressionLevel(a, b) ==
          static_cast<double>(oracle::AsciiWords(b).size()) /
              static_cast<double>(oracle::AsciiWords(a).size()));
    const int na = 1 + static_cast<int>(rng() % 4);
    const int nb = 1 + static_cast<int>(rng() % 4);
    std::string sa, sb;
    for (int i = 0; i < na; ++i) sa += "Word number " + std::to_string(i) + ". ";
    for (int i = 0; i < nb; ++i) sb += "Other line here! ";
    CHECK(SentenceSplitDifference(sa, sb) == nb - na);
  }
}

TEST_CASE("dependency tree depth") {
  CHECK(DependencyTreeDepth(Chain(1)) == 1);
  CHECK(DependencyTreeDepth(Chain(4)) == 4);
  ParsedSentence cyc = Chain(3);
  cyc.heads = {2, 0, 1};
  CHECK_THROWS_AS(DependencyTreeDepth(cyc), Error);
  ParsedSentence two_roots = Chain(3);
  two_roots.heads = {-1, 0, -1};
  CHECK_THROWS_AS(DependencyTreeDepth(two_roots), Error);
  ParsedSentence out_of_range = Chain(2);
  out_of_range.heads = {-1, 5};
  CHECK_THROWS_AS(DependencyTreeDepth(out_of_range), Error);

  std::mt19937 rng(9);
  for (int t = 0; t < 500; ++t) {
    const int n = 1 + static_cast<int>(rng() % 8);
    std::vector<int> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::shuffle(order.begin(), order.end(), rng);
    ParsedSentence s;
    s.tokens.assign(n, "w");
    s.heads.assign(n, -1);
    for (int i = 1; i < n; ++i) s.heads[order[i]] = order[rng() % i];
    CHECK(DependencyTreeDepth(s) == oracle::TreeDepth(s.heads));
  }
}

TEST_CASE("depth ratio") {
  std::vector<ParsedSentence> three = {Chain(2), Chain(3)};
  std::vector<ParsedSentence> six = {Chain(6)};
  CHECK(DepthRatio(three, three) == 1.0);
  CHECK(DepthRatio(three, six) == 2.0);
  CHECK_FALSE(DepthRatio({}, six).has_value());
  CHECK_FALSE(DepthRatio(three, {}).has_value());
}

TEST_CASE("conllu reader") {
  std::istringstream in(
      "# newdoc id = d1\n"
      "# sent_id = 1\n"
      "1\tThe\tthe\tDET\t_\t_\t2\tdet\t_\t_\n"
      "2\tcat\tcat\tNOUN\t_\t_\t3\tnsubj\t_\t_\n"
      "3\tsat\tsit\tVERB\t_\t_\t0\troot\t_\t_\n"
      "\n"
      "1-2\tdon't\t_\t_\t_\t_\t_\t_\t_\t_\n"
      "1\tdo\t_\t_\t_\t_\t0\t_\t_\t_\n"
      "2\tn't\t_\t_\t_\t_\t1\t_\t_\t_\n"
      "2.1\tghost\t_\t_\t_\t_\t_\t_\t_\t_\n"
      "\n"
      "# doc_id = d2\n"
      "1\tGo\t0\n"
      "\n");
  const auto parsed = ReadConllu(in);
  REQUIRE(parsed.size() == 2);
  REQUIRE(parsed.at("d1").size() == 2);
  CHECK(DependencyTreeDepth(parsed.at("d1")[0]) == 3);
  CHECK(parsed.at("d1")[1].tokens == Words{"do", "n't"});
  CHECK(DependencyTreeDepth(parsed.at("d2")[0]) == 1);

  std::istringstream bad("# doc_id = x\n1\ta\t2\n2\tb\t1\n\n");
  CHECK_THROWS_AS(ReadConllu(bad), Error);
}

TEST_CASE("rouge-2") {
  CHECK(Rouge2("the cat sat", "the cat sat") == 1.0);
  CHECK(Rouge2("a b", "c d") == 0.0);
  CHECK(Rouge2("a b c", "a b d") == 0.5);
  CHECK(Rouge2("", "") == 1.0);
  CHECK(Rouge2("a", "a b") == doctest::Approx(2.0 / 3.0));
  CHECK(Rouge2("", "a b") == 0.0);
}

TEST_CASE("rouge-l") {
  CHECK(RougeL("a b c d", "a b c d") == 1.0);
  CHECK(RougeL("a b c d", "a x c y") == 0.5);
  CHECK(RougeL("a b", "c d") == 0.0);
}

TEST_CASE("rouge agrees with brute-force oracles") {
  std::mt19937 rng(13);
  for (int t = 0; t < 1000; ++t) {
    const std::string c = RandomText(rng, 10, 1 + t % 6);
    const std::string r = RandomText(rng, 10, 1 + t % 6);
    const auto cw = oracle::AsciiWords(c);
    const auto rw = oracle::AsciiWords(r);
    CHECK(Rouge2(c, r) == doctest::Approx(oracle::Rouge2(cw, rw)).epsilon(1e-12));
    CHECK(RougeL(c, r) == doctest::Approx(oracle::RougeL(cw, rw)).epsilon(1e-12));
    CHECK(LcsLength(cw, rw) == oracle::BruteLcs(cw, rw));
    CHECK(Rouge2(c, r) == Rouge2(r, c));
  }
}

TEST_CASE("overlap buckets") {
  CHECK(BucketOf(1.0) == OverlapBucket::kExactMatch);
  CHECK(BucketOf(0.9) == OverlapBucket::kHigh);
  CHECK(BucketOf(0.8) == OverlapBucket::kMedium);
  CHECK(BucketOf(0.4) == OverlapBucket::kLow);
  CHECK(BucketOf(0.0) == OverlapBucket::kExactMismatch);
  CHECK_THROWS_AS(BucketOf(1.01), Error);
  CHECK_THROWS_AS(BucketOf(-0.1), Error);
  CHECK_THROWS_AS(BucketOf(std::nan("")), Error);
}

TEST_CASE("cosine similarity") {
  std::vector<double> v = {1.0, -2.0, 3.5};
  std::vector<double> w = {3.0, -6.0, 10.5};
  std::vector<double> e1 = {1.0, 0.0, 0.0};
  std::vector<double> e2 = {0.0, 1.0, 0.0};
  CHECK(std::abs(CosineSimilarity(v, v) - 1.0) < 1e-9);
  CHECK(std::abs(CosineSimilarity(v, w) - 1.0) < 1e-9);
  CHECK(CosineSimilarity(e1, e2) == 0.0);
  CHECK(CosineSimilarity(v, e2) == CosineSimilarity(e2, v));
  std::vector<double> zero = {0.0, 0.0, 0.0};
  std::vector<double> short_v = {1.0};
  CHECK_THROWS_AS(CosineSimilarity(v, zero), Error);
  CHECK_THROWS_AS(CosineSimilarity(v, short_v), Error);
}

TEST_CASE("compute metrics on a pair") {
  ParallelPair p{"p", {"p", "The cat sat on the mat today.", {}},
                 {"p", "The cat sat. It was on the mat.", {}}};
  std::vector<double> a = {1, 0}, b = {1, 1};
  std::vector<ParsedSentence> nat = {Chain(3)}, simp = {Chain(2), Chain(1)};
  PairInputs in;
  in.natural_parses = nat;
  in.simplified_parses = simp;
  in.natural_embedding = std::span<const double>(a);
  in.simplified_embedding = std::span<const double>(b);
  const MetricRecord r = ComputeMetrics(p, in);
  CHECK(r.pair_id == "p");
  CHECK(r.split_diff == 1);
  CHECK(r.compression == doctest::Approx(8.0 / 7.0));
  CHECK(*r.depth_ratio == doctest::Approx(2.0 / 3.0));
  CHECK(*r.cosine == doctest::Approx(std::sqrt(0.5)));
  // Stored unclipped; the outlier policy clamps later.
  CHECK(r.fre_a == FleschReadingEase(p.side_a.text));
  CHECK(r.fre_b == FleschReadingEase(p.side_b.text));
  CHECK(r.fre_b > 100.0);

  ParallelPair empty{"e", {"e", "", {}}, {"e", "x", {}}};
  CHECK_THROWS_WITH_AS(ComputeMetrics(empty), doctest::Contains("pair e"), Error);
}

TEST_CASE("cross-dataset stats") {
  std::vector<ParallelPair> same;
  for (int i = 0; i < 5; ++i) {
    const std::string t = "sentence number " + std::to_string(i) + " is here";
    same.push_back({std::to_string(i), {std::to_string(i), t, {}},
                    {std::to_string(i), t, {}}});
  }
  auto s = ComputeCrossDatasetStats(
      same, [](const std::string &id, bool) {
        return std::optional<std::vector<double>>({1.0, static_cast<double>(id[0])});
      });
  CHECK(s.pct_exact_match == 100.0);
  CHECK(s.pct_compression_lt_80 == 0.0);
  CHECK(s.pct_sim_gt_80 == 100.0);

  // R2 = 1, 0.9, 0.6, 0.2 and 0 respectively.
  const std::vector<std::pair<std::string, std::string>> five = {
      {"a b c", "a b c"},
      {"a b c d e f g h i j k", "a b c d e f g h i j x"},
      {"a b c d e f", "a b c d x y"},
      {"a b c d e f", "a b x y z w"},
      {"a b", "c d"}};
  std::vector<ParallelPair> pairs;
  for (std::size_t i = 0; i < five.size(); ++i) {
    const auto id = std::to_string(i);
    pairs.push_back({id, {id, five[i].first, {}}, {id, five[i].second, {}}});
  }
  s = ComputeCrossDatasetStats(pairs);
  CHECK(s.pct_exact_match == 20.0);
  CHECK(s.pct_high == 20.0);
  CHECK(s.pct_medium == 20.0);
  CHECK(s.pct_low == 20.0);
  CHECK(s.pct_exact_mismatch == 20.0);
  CHECK_FALSE(s.pct_sim_gt_80.has_value());
  CHECK(CrossDatasetStatsFromJson(ToJson(s)).pct_low == 20.0);
  CHECK_THROWS_AS(ComputeCrossDatasetStats(std::span<const MetricRecord>()), Error);
}
