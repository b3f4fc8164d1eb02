/* Copyright 2026 The SSMT Desk Authors. All Rights Reserved.

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
==============================================================================*/
#include <algorithm>
#include <random>

#include "doctest.h"
#include "ssmt/common/io.h"
#include "ssmt/common/status.h"
#include "ssmt/metrics/metrics.h"
#include "support/edit_distance_oracle.h"

using namespace ssmt;

namespace {

std::vector<Token> T(const char* s) { return SplitWhitespace(s); }

BleuOptions NoTok() {
  BleuOptions o;
  o.tokenizer = BleuTokenizer::kNone;
  return o;
}

}  // namespace

TEST_CASE("wer examples") {
  auto same = ComputeWer(T("a b c"), T("a b c"));
  CHECK(same.wer == 0.0);
  CHECK(same.edits() == 0);
  CHECK(same.correct == 3);

  auto w = ComputeWer(T("a b c d"), T("a x c"));
  CHECK(w.substitutions == 1);
  CHECK(w.deletions == 1);
  CHECK(w.insertions == 0);
  CHECK(w.wer == 0.5);

  auto ins = ComputeWer(T("a"), T("a b c"));
  CHECK(ins.insertions == 2);
  CHECK(ins.wer == 2.0);

  CHECK(ComputeWer(T("a b"), {}).deletions == 2);
  CHECK_THROWS_AS(ComputeWer({}, T("a")), InvalidArgument);
}

TEST_CASE("wer backtrace prefers substitution over deletion plus insertion") {
  // "a b" -> "c": one sub + one del either way; the backtrace from the end
  // substitutes b->c and deletes a.
  auto w = ComputeWer(T("a b"), T("c"));
  CHECK(w.substitutions == 1);
  CHECK(w.deletions == 1);
  CHECK(w.insertions == 0);
}

TEST_CASE("wer matches the brute-force oracle") {
  std::mt19937_64 rng(2024);
  for (int trial = 0; trial < 2000; ++trial) {
    auto ref = testing::RandomTokens(rng, 1, 12, 4);
    auto hyp = testing::RandomTokens(rng, 0, 12, 4);
    auto w = ComputeWer(ref, hyp);
    long dist = testing::BruteForceEditDistance(ref, hyp);
    REQUIRE(w.edits() == dist);
    CHECK(w.ref_words == w.substitutions + w.deletions + w.correct);
    CHECK(static_cast<long>(hyp.size()) == w.substitutions + w.insertions + w.correct);
    CHECK(w.wer == doctest::Approx(static_cast<double>(dist) / static_cast<double>(ref.size())));
    CHECK(ComputeWer(ref, ref).wer == 0.0);
  }
}

TEST_CASE("corpus wer sums counts") {
  auto w = ComputeCorpusWer({T("a b c d"), T("x y")}, {T("a x c"), T("x y")});
  CHECK(w.ref_words == 6);
  CHECK(w.edits() == 2);
  CHECK(w.wer == doctest::Approx(2.0 / 6.0));
  CHECK_THROWS_AS(ComputeCorpusWer({T("a")}, {}), InvalidArgument);
}

TEST_CASE("13a tokenization matches the reference scorer") {
  // Expected strings produced by sacrebleu's Tokenizer13a.
  CHECK(Tokenize13a("Hello, world!") == "Hello , world !");
  CHECK(Tokenize13a("It costs $3.50 (approx.) -- 1,000 items.") ==
        "It costs $ 3.50 ( approx . ) -- 1,000 items .");
  CHECK(Tokenize13a("don't stop-me 5-6 a.b") == "don't stop-me 5 - 6 a . b");
  CHECK(Tokenize13a("&quot;x&quot; &amp; y<skipped>") == "\" x \" & y");
  CHECK(Tokenize13a("नमस्ते, दुनिया।") ==
        "नमस्ते , दुनिया।");
}

TEST_CASE("bleu sanity") {
  std::vector<std::string> refs{"the cat sat on the mat", "a quick brown fox jumps"};
  CHECK(ComputeBleu(refs, refs).score == doctest::Approx(100.0));
  CHECK(ComputeBleu({"x y z w"}, {"a b c d"}).score == 0.0);

  auto clipped = ComputeBleu({"the the the"}, {"the cat"}, NoTok());
  CHECK(clipped.stats.correct == std::vector<std::int64_t>{1, 0, 0, 0});
  CHECK(clipped.stats.total == std::vector<std::int64_t>{3, 2, 1, 0});
  CHECK(clipped.precisions[0] == doctest::Approx(1.0 / 3.0));
  CHECK(clipped.score == 0.0);
  CHECK(clipped.brevity_penalty == 1.0);

  CHECK_THROWS_AS(ComputeBleu({"a"}, {"a", "b"}), InvalidArgument);
  CHECK_THROWS_AS(ComputeBleu({}, {}), InvalidArgument);
}

TEST_CASE("bleu agrees with the reference scorer") {
  // Frozen from sacrebleu.corpus_bleu(..., smooth_method='none').
  std::vector<std::string> hyps{"The cat sat on the mat.", "It is raining, isn't it?",
                                "We need three tickets for the flight."};
  std::vector<std::string> refs{"The cat is on the mat.", "It's raining, isn't it?",
                                "We need three tickets for the flight to New York."};
  auto b = ComputeBleu(hyps, refs);
  CHECK(b.stats.correct == std::vector<std::int64_t>{19, 14, 10, 7});
  CHECK(b.stats.total == std::vector<std::int64_t>{22, 19, 16, 13});
  CHECK(b.stats.hyp_len == 22);
  CHECK(b.stats.ref_len == 24);
  CHECK(b.brevity_penalty == doctest::Approx(0.9131007162822624).epsilon(1e-12));
  CHECK(b.score == doctest::Approx(62.116031059455324).epsilon(1e-12));

  CHECK(ComputeBleu({"a b c d e"}, {"a b c d x"}, NoTok()).score ==
        doctest::Approx(66.87403049764218).epsilon(1e-12));

  BleuOptions exp = NoTok();
  exp.smoothing = BleuSmoothing::kExp;
  // Total 3-gram count is zero, so even exp smoothing yields 0.
  CHECK(ComputeBleu({"a b"}, {"a b c d"}, exp).score == 0.0);
  // One zero order: precision 1 / (2 * total).
  auto s = ComputeBleu({"a b c x"}, {"a b c d"}, exp);
  CHECK(s.precisions[3] == doctest::Approx(0.5));
  CHECK(s.score > 0.0);
}

TEST_CASE("bleu is invariant to sentence order") {
  std::mt19937_64 rng(5);
  std::vector<std::string> hyps, refs;
  for (int s = 0; s < 40; ++s) {
    hyps.push_back(JoinTokens(testing::RandomTokens(rng, 2, 15, 6)));
    refs.push_back(JoinTokens(testing::RandomTokens(rng, 2, 15, 6)));
  }
  double base = ComputeBleu(hyps, refs).score;
  std::vector<size_t> order(hyps.size());
  for (size_t i = 0; i < order.size(); ++i) order[i] = i;
  for (int k = 0; k < 20; ++k) {
    std::shuffle(order.begin(), order.end(), rng);
    std::vector<std::string> h, r;
    for (size_t i : order) {
      h.push_back(hyps[i]);
      r.push_back(refs[i]);
    }
    CHECK(ComputeBleu(h, r).score == base);
  }
}

TEST_CASE("parallel n-gram accumulation equals the serial reference") {
  std::mt19937_64 rng(77);
  std::vector<std::vector<Token>> hyps, refs;
  for (int s = 0; s < 1000; ++s) {
    hyps.push_back(testing::RandomTokens(rng, 0, 20, 5));
    refs.push_back(testing::RandomTokens(rng, 0, 20, 5));
  }
  CHECK(AccumulateNgramStats(hyps, refs, 4) == AccumulateNgramStatsSerial(hyps, refs, 4));
}

TEST_CASE("rational arithmetic") {
  CHECK(Rational::Parse("4.70") == Rational(47, 10));
  CHECK(Rational::Parse("5") == Rational(5));
  CHECK(Rational::Parse(".5") == Rational(1, 2));
  CHECK_THROWS_AS(Rational::Parse("4,7"), InvalidArgument);
  CHECK_THROWS_AS(Rational::Parse(""), InvalidArgument);
  CHECK_THROWS_AS(Rational::Parse("."), InvalidArgument);
  CHECK(Rational(9, 2).ToFixed(0) == "5");
  CHECK(Rational(1, 8).ToFixed(2) == "0.13");  // 0.125 rounds half up
  CHECK(Rational(-1, 8).ToFixed(2) == "-0.13");
  CHECK(Rational(2, 3).ToFixed(2) == "0.67");
  CHECK(Rational(1, 3) + Rational(1, 6) == Rational(1, 2));
}

TEST_CASE("mos averages audio quality and interpretability") {
  CHECK(ComputeMos(Rational::Parse("4.70"), Rational::Parse("4.48")).mos.ToFixed(2) == "4.59");
  CHECK(ComputeMos(Rational::Parse("4.63"), Rational::Parse("4.21")).mos.ToFixed(2) == "4.42");
  CHECK(ComputeMos(Rational(0), Rational(0)).mos == Rational(0));
  CHECK_THROWS_AS(ComputeMos(Rational::Parse("5.01"), Rational(1)), InvalidArgument);
  CHECK_THROWS_AS(ComputeMos(Rational(1), Rational(-1)), InvalidArgument);
}

TEST_CASE("mos reproduces every published TTS row") {
  auto lines = ReadLines(DataDir() / "fixtures" / "table8_mos.csv");
  REQUIRE(lines.size() == 5);
  for (size_t k = 1; k < lines.size(); ++k) {
    auto f = SplitString(lines[k], ',');
    auto m = ComputeMos(Rational::Parse(f[2]), Rational::Parse(f[3]));
    CHECK(m.mos.ToFixed(2) == f[4]);
    CHECK(m.mos == Rational::Parse(f[4]));  // exact, not just after rounding
  }
}

TEST_CASE("kpi aggregation") {
  auto one = AggregateKpi({{"r1", "en-hi", Rational(4), Rational(4), Rational(4)}});
  CHECK(one.tq == Rational(4));
  CHECK(one.n_raters == 1);

  auto two = AggregateKpi({{"r1", "p", Rational(3), Rational(5), Rational(4)},
                           {"r2", "p", Rational(5), Rational(3), Rational(4)}});
  CHECK(two.tq == Rational(4));
  CHECK(two.sq == Rational(4));
  CHECK(two.i == Rational(4));
  CHECK(two.n_raters == 2);

  CHECK_THROWS_AS(AggregateKpi({}), InvalidArgument);
  CHECK_THROWS_AS(AggregateKpi({{"r", "p", Rational(6), Rational(1), Rational(1)}}),
                  InvalidArgument);
}

TEST_CASE("kpi means stay within the rating range") {
  std::mt19937_64 rng(9);
  std::uniform_int_distribution<int> hundredths(0, 500);
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<KpiRating> rows;
    Rational lo(5), hi(0);
    for (int r = 0; r < 1 + trial % 17; ++r) {
      Rational v(hundredths(rng), 100);
      rows.push_back({"r" + std::to_string(r), "p", v, v, v});
      if (v < lo) lo = v;
      if (hi < v) hi = v;
    }
    auto s = AggregateKpi(rows);
    CHECK(lo <= s.tq);
    CHECK(s.tq <= hi);
  }
}

TEST_CASE("ratings csv and report round trip") {
  auto rows = ParseRatingsCsv(
      "rater,pair,tq,sq,i\n"
      "a,en-hi,4,5,4.5\n"
      "b,en-hi,5,4,4.5\n"
      "a,hi-mr,3.25,3,3\n");
  REQUIRE(rows.size() == 3);
  auto by_pair = AggregateKpiByPair(rows);
  CHECK(by_pair.at("en-hi").tq == Rational(9, 2));
  CHECK(by_pair.at("hi-mr").n_raters == 1);
  CHECK_THROWS_AS(ParseRatingsCsv("who,what\n"), FormatError);
  CHECK_THROWS_AS(ParseRatingsCsv("rater,pair,tq,sq,i\na,b,c,d,e\n"), FormatError);

  auto fixture = ReadFile(DataDir() / "fixtures" / "table3_kpi.csv");
  auto parsed = ParseKpiReport(fixture);
  CHECK(parsed.at("en-hi").tq.ToFixed(2) == "4.43");
  CHECK(parsed.at("en-mr").tq.ToFixed(2) == "4.11");
  CHECK(parsed.at("hi-mr").tq.ToFixed(2) == "4.08");
  CHECK(parsed.at("hi-mr").i.ToFixed(2) == "4.87");
  CHECK(FormatKpiReport(parsed) == fixture);
}
