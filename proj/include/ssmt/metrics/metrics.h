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
#ifndef SSMT_METRICS_METRICS_H_
#define SSMT_METRICS_METRICS_H_

#include <array>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "ssmt/metrics/rational.h"
#include "ssmt/textprep/text.h"

namespace ssmt {

// ---------------------------------------------------------------------------
// Word error rate.

struct WerBreakdown {
  std::int64_t substitutions = 0;
  std::int64_t deletions = 0;
  std::int64_t insertions = 0;
  std::int64_t correct = 0;
  std::int64_t ref_words = 0;  // N = S + D + C
  double wer = 0;              // (S + D + I) / N; exceeds 1 with insertions

  std::int64_t edits() const { return substitutions + deletions + insertions; }
};

// Minimal unit-cost Levenshtein alignment. Among optimal alignments the
// backtrace prefers correct > substitution > deletion > insertion at every
// step, so the breakdown is deterministic. Empty reference: InvalidArgument.
WerBreakdown ComputeWer(const std::vector<Token>& ref, const std::vector<Token>& hyp);

// Corpus WER: counts summed over sentence pairs.
WerBreakdown ComputeCorpusWer(const std::vector<std::vector<Token>>& refs,
                              const std::vector<std::vector<Token>>& hyps);

// ---------------------------------------------------------------------------
// BLEU.

enum class BleuSmoothing { kNone, kExp };
enum class BleuTokenizer { k13a, kNone };

struct BleuOptions {
  int max_n = 4;
  BleuSmoothing smoothing = BleuSmoothing::kNone;
  BleuTokenizer tokenizer = BleuTokenizer::k13a;
};

// Sufficient statistics of corpus BLEU; sums of per-sentence counts, so any
// split of the corpus can be merged with operator+=.
struct NgramStats {
  std::vector<std::int64_t> correct;  // clipped matches per order
  std::vector<std::int64_t> total;    // hypothesis n-grams per order
  std::int64_t hyp_len = 0;
  std::int64_t ref_len = 0;

  explicit NgramStats(int max_n = 4) : correct(max_n, 0), total(max_n, 0) {}
  NgramStats& operator+=(const NgramStats& o);
  friend bool operator==(const NgramStats&, const NgramStats&) = default;
};

struct BleuScore {
  double score = 0;                    // [0, 100]
  std::vector<double> precisions;      // per order, as ratios in [0, 1]
  double brevity_penalty = 0;          // (0, 1]; 0 only for an empty system
  NgramStats stats;
};

// mteval-v13a tokenization as used by common BLEU scorers.
std::string Tokenize13a(const std::string& line);

NgramStats SentenceNgramStats(const std::vector<Token>& hyp, const std::vector<Token>& ref,
                              int max_n);

// Per-sentence counting fanned out with OpenMP; the serial version is the
// reference the parallel kernel is tested against.
NgramStats AccumulateNgramStats(const std::vector<std::vector<Token>>& hyps,
                                const std::vector<std::vector<Token>>& refs, int max_n);
NgramStats AccumulateNgramStatsSerial(const std::vector<std::vector<Token>>& hyps,
                                      const std::vector<std::vector<Token>>& refs, int max_n);

BleuScore BleuFromStats(const NgramStats& stats, BleuSmoothing smoothing);

// Corpus BLEU, one reference per hypothesis.
BleuScore ComputeBleu(const std::vector<std::string>& hyps,
                      const std::vector<std::string>& refs,
                      const BleuOptions& options = {});

// ---------------------------------------------------------------------------
// Listening-test scores. Ratings are on [0, 5].

inline const Rational kMaxRating{5};

struct Mos {
  Rational audio_quality;
  Rational interpretability;
  Rational mos;  // (AQ + I) / 2, exact
};

Mos ComputeMos(const Rational& audio_quality, const Rational& interpretability);

struct KpiRating {
  std::string rater;
  std::string pair;
  Rational tq;
  Rational sq;
  Rational i;
};

struct KpiSummary {
  Rational tq;
  Rational sq;
  Rational i;
  std::int64_t n_raters = 0;
};

KpiSummary AggregateKpi(const std::vector<KpiRating>& ratings);
// One summary per language pair, keyed by pair name.
std::map<std::string, KpiSummary> AggregateKpiByPair(const std::vector<KpiRating>& ratings);

// Header `rater,pair,tq,sq,i`.
std::vector<KpiRating> ParseRatingsCsv(const std::string& contents);

// Report format: header `pair,tq,sq,i,n_raters`, values to two decimals.
std::string FormatKpiReport(const std::map<std::string, KpiSummary>& summaries);
std::map<std::string, KpiSummary> ParseKpiReport(const std::string& contents);

}  // namespace ssmt

#endif  // SSMT_METRICS_METRICS_H_
