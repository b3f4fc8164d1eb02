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
#include "ssmt/metrics/metrics.h"

#include <omp.h>

#include <cmath>
#include <regex>
#include <set>
#include <sstream>
#include <unordered_map>

#include "ssmt/common/io.h"
#include "ssmt/common/status.h"

namespace ssmt {

// ---------------------------------------------------------------------------
// WER

namespace {

enum class Op : std::uint8_t { kCorrect, kSub, kDel, kIns };

}  // namespace

WerBreakdown ComputeWer(const std::vector<Token>& ref, const std::vector<Token>& hyp) {
  if (ref.empty()) throw InvalidArgument("WER is undefined for an empty reference");
  const size_t n = ref.size();
  const size_t m = hyp.size();
  std::vector<std::int64_t> d((n + 1) * (m + 1));
  auto at = [&](size_t i, size_t j) -> std::int64_t& { return d[i * (m + 1) + j]; };
  for (size_t i = 0; i <= n; ++i) at(i, 0) = static_cast<std::int64_t>(i);
  for (size_t j = 0; j <= m; ++j) at(0, j) = static_cast<std::int64_t>(j);
  for (size_t i = 1; i <= n; ++i)
    for (size_t j = 1; j <= m; ++j)
      at(i, j) = std::min({at(i - 1, j - 1) + (ref[i - 1] == hyp[j - 1] ? 0 : 1),
                           at(i - 1, j) + 1, at(i, j - 1) + 1});

  WerBreakdown w;
  size_t i = n, j = m;
  while (i > 0 || j > 0) {
    Op op;
    if (i > 0 && j > 0 && ref[i - 1] == hyp[j - 1] && at(i, j) == at(i - 1, j - 1)) {
      op = Op::kCorrect;
    } else if (i > 0 && j > 0 && at(i, j) == at(i - 1, j - 1) + 1) {
      op = Op::kSub;
    } else if (i > 0 && at(i, j) == at(i - 1, j) + 1) {
      op = Op::kDel;
    } else {
      op = Op::kIns;
    }
    switch (op) {
      case Op::kCorrect: ++w.correct; --i; --j; break;
      case Op::kSub: ++w.substitutions; --i; --j; break;
      case Op::kDel: ++w.deletions; --i; break;
      case Op::kIns: ++w.insertions; --j; break;
    }
  }
  w.ref_words = static_cast<std::int64_t>(n);
  w.wer = static_cast<double>(w.edits()) / static_cast<double>(n);
  return w;
}

WerBreakdown ComputeCorpusWer(const std::vector<std::vector<Token>>& refs,
                              const std::vector<std::vector<Token>>& hyps) {
  if (refs.size() != hyps.size())
    throw InvalidArgument("reference and hypothesis line counts differ");
  WerBreakdown total;
  for (size_t s = 0; s < refs.size(); ++s) {
    if (refs[s].empty()) {
      total.insertions += static_cast<std::int64_t>(hyps[s].size());
      continue;
    }
    auto w = ComputeWer(refs[s], hyps[s]);
    total.substitutions += w.substitutions;
    total.deletions += w.deletions;
    total.insertions += w.insertions;
    total.correct += w.correct;
    total.ref_words += w.ref_words;
  }
  if (total.ref_words == 0) throw InvalidArgument("WER is undefined for an empty reference");
  total.wer = static_cast<double>(total.edits()) / static_cast<double>(total.ref_words);
  return total;
}

// ---------------------------------------------------------------------------
// BLEU

NgramStats& NgramStats::operator+=(const NgramStats& o) {
  if (o.correct.size() != correct.size()) throw InvalidArgument("n-gram order mismatch");
  for (size_t k = 0; k < correct.size(); ++k) {
    correct[k] += o.correct[k];
    total[k] += o.total[k];
  }
  hyp_len += o.hyp_len;
  ref_len += o.ref_len;
  return *this;
}

std::string Tokenize13a(const std::string& input) {
  static const std::regex kPunct(R"re(([{|}~\[\\\]^_` !"#$%&()*+:;<=>?@/]))re");
  static const std::regex kPeriodCommaAfterNonDigit(R"re(([^0-9])([.,]))re");
  static const std::regex kPeriodCommaBeforeNonDigit(R"re(([.,])([^0-9]))re");
  static const std::regex kDashAfterDigit(R"re(([0-9])(-))re");

  std::string line = input;
  auto replace_all = [&line](const std::string& from, const std::string& to) {
    for (size_t pos = line.find(from); pos != std::string::npos; pos = line.find(from, pos)) {
      line.replace(pos, from.size(), to);
      pos += to.size();
    }
  };
  replace_all("<skipped>", "");
  replace_all("-\n", "");
  replace_all("\n", " ");
  if (line.find('&') != std::string::npos) {
    replace_all("&quot;", "\"");
    replace_all("&amp;", "&");
    replace_all("&lt;", "<");
    replace_all("&gt;", ">");
  }
  line = " " + line + " ";
  line = std::regex_replace(line, kPunct, " $1 ");
  line = std::regex_replace(line, kPeriodCommaAfterNonDigit, "$1 $2 ");
  line = std::regex_replace(line, kPeriodCommaBeforeNonDigit, " $1 $2");
  line = std::regex_replace(line, kDashAfterDigit, "$1 $2 ");
  return JoinTokens(SplitWhitespace(line));
}

namespace {

using NgramCounts = std::unordered_map<std::string, std::int64_t>;

NgramCounts CountNgrams(const std::vector<Token>& toks, int n) {
  NgramCounts counts;
  if (toks.size() < static_cast<size_t>(n)) return counts;
  for (size_t i = 0; i + n <= toks.size(); ++i) {
    std::string key = toks[i];
    for (int k = 1; k < n; ++k) {
      key.push_back('\x1f');
      key += toks[i + k];
    }
    ++counts[key];
  }
  return counts;
}

void CheckParallel(size_t hyps, size_t refs) {
  if (hyps != refs)
    throw InvalidArgument("hypothesis count " + std::to_string(hyps) +
                          " != reference count " + std::to_string(refs));
}

}  // namespace

NgramStats SentenceNgramStats(const std::vector<Token>& hyp, const std::vector<Token>& ref,
                              int max_n) {
  NgramStats stats(max_n);
  stats.hyp_len = static_cast<std::int64_t>(hyp.size());
  stats.ref_len = static_cast<std::int64_t>(ref.size());
  for (int n = 1; n <= max_n; ++n) {
    NgramCounts h = CountNgrams(hyp, n);
    NgramCounts r = CountNgrams(ref, n);
    std::int64_t total = hyp.size() >= static_cast<size_t>(n) ? hyp.size() - n + 1 : 0;
    std::int64_t correct = 0;
    for (const auto& [gram, count] : h) {
      auto it = r.find(gram);
      if (it != r.end()) correct += std::min(count, it->second);
    }
    stats.correct[n - 1] = correct;
    stats.total[n - 1] = total;
  }
  return stats;
}

NgramStats AccumulateNgramStatsSerial(const std::vector<std::vector<Token>>& hyps,
                                      const std::vector<std::vector<Token>>& refs, int max_n) {
  CheckParallel(hyps.size(), refs.size());
  NgramStats sum(max_n);
  for (size_t s = 0; s < hyps.size(); ++s) sum += SentenceNgramStats(hyps[s], refs[s], max_n);
  return sum;
}

NgramStats AccumulateNgramStats(const std::vector<std::vector<Token>>& hyps,
                                const std::vector<std::vector<Token>>& refs, int max_n) {
  CheckParallel(hyps.size(), refs.size());
  NgramStats sum(max_n);
  const auto count = static_cast<std::int64_t>(hyps.size());
#pragma omp parallel
  {
    NgramStats local(max_n);
#pragma omp for schedule(dynamic, 64) nowait
    for (std::int64_t s = 0; s < count; ++s)
      local += SentenceNgramStats(hyps[s], refs[s], max_n);
#pragma omp critical(ssmt_bleu_merge)
    sum += local;
  }
  return sum;
}

BleuScore BleuFromStats(const NgramStats& stats, BleuSmoothing smoothing) {
  BleuScore out;
  out.stats = stats;
  const size_t max_n = stats.correct.size();
  out.precisions.assign(max_n, 0.0);

  out.brevity_penalty = 1.0;
  if (stats.hyp_len < stats.ref_len)
    out.brevity_penalty =
        stats.hyp_len > 0
            ? std::exp(1.0 - static_cast<double>(stats.ref_len) / static_cast<double>(stats.hyp_len))
            : 0.0;

  bool any_match = false;
  for (auto c : stats.correct) any_match |= c > 0;
  if (!any_match) return out;

  double exp_smooth = 1.0;
  for (size_t k = 0; k < max_n; ++k) {
    if (stats.total[k] == 0) break;
    if (stats.correct[k] == 0) {
      if (smoothing == BleuSmoothing::kExp) {
        exp_smooth *= 2;
        out.precisions[k] = 1.0 / (exp_smooth * static_cast<double>(stats.total[k]));
      }
    } else {
      out.precisions[k] =
          static_cast<double>(stats.correct[k]) / static_cast<double>(stats.total[k]);
    }
  }
  double log_sum = 0;
  for (double p : out.precisions) {
    if (p <= 0) return out;  // score stays 0
    log_sum += std::log(p);
  }
  out.score = 100.0 * out.brevity_penalty * std::exp(log_sum / static_cast<double>(max_n));
  return out;
}

BleuScore ComputeBleu(const std::vector<std::string>& hyps, const std::vector<std::string>& refs,
                      const BleuOptions& options) {
  CheckParallel(hyps.size(), refs.size());
  if (hyps.empty()) throw InvalidArgument("BLEU needs at least one sentence");
  if (options.max_n < 1) throw InvalidArgument("max_n must be >= 1");
  auto tok = [&](const std::string& s) {
    return SplitWhitespace(options.tokenizer == BleuTokenizer::k13a ? Tokenize13a(s) : s);
  };
  std::vector<std::vector<Token>> h, r;
  h.reserve(hyps.size());
  r.reserve(refs.size());
  for (const auto& s : hyps) h.push_back(tok(s));
  for (const auto& s : refs) r.push_back(tok(s));
  return BleuFromStats(AccumulateNgramStats(h, r, options.max_n), options.smoothing);
}

// ---------------------------------------------------------------------------
// MOS and KPI survey

namespace {

void CheckRating(const Rational& r, const char* what) {
  if (r < Rational(0) || kMaxRating < r)
    throw InvalidArgument(std::string(what) + " rating " + r.ToFixed(2) + " outside [0, 5]");
}

}  // namespace

Mos ComputeMos(const Rational& audio_quality, const Rational& interpretability) {
  CheckRating(audio_quality, "audio quality");
  CheckRating(interpretability, "interpretability");
  return {audio_quality, interpretability, (audio_quality + interpretability) / Rational(2)};
}

KpiSummary AggregateKpi(const std::vector<KpiRating>& ratings) {
  if (ratings.empty()) throw InvalidArgument("no ratings to aggregate");
  Rational tq, sq, i;
  std::set<std::string> raters;
  for (const auto& r : ratings) {
    CheckRating(r.tq, "TQ");
    CheckRating(r.sq, "SQ");
    CheckRating(r.i, "I");
    tq = tq + r.tq;
    sq = sq + r.sq;
    i = i + r.i;
    raters.insert(r.rater);
  }
  Rational n(static_cast<std::int64_t>(ratings.size()));
  return {tq / n, sq / n, i / n, static_cast<std::int64_t>(raters.size())};
}

std::map<std::string, KpiSummary> AggregateKpiByPair(const std::vector<KpiRating>& ratings) {
  if (ratings.empty()) throw InvalidArgument("no ratings to aggregate");
  std::map<std::string, std::vector<KpiRating>> groups;
  for (const auto& r : ratings) groups[r.pair].push_back(r);
  std::map<std::string, KpiSummary> out;
  for (const auto& [pair, rows] : groups) out[pair] = AggregateKpi(rows);
  return out;
}

std::vector<KpiRating> ParseRatingsCsv(const std::string& contents) {
  std::istringstream in(contents);
  std::string line;
  if (!std::getline(in, line)) throw FormatError("ratings CSV is empty");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (Trim(line) != "rater,pair,tq,sq,i")
    throw FormatError("ratings CSV header must be 'rater,pair,tq,sq,i'");
  std::vector<KpiRating> out;
  int lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    line = Trim(line);
    if (line.empty()) continue;
    auto f = SplitString(line, ',');
    if (f.size() != 5) throw FormatError("ratings CSV line " + std::to_string(lineno) + ": expected 5 fields");
    try {
      out.push_back({Trim(f[0]), Trim(f[1]), Rational::Parse(Trim(f[2])),
                     Rational::Parse(Trim(f[3])), Rational::Parse(Trim(f[4]))});
    } catch (const InvalidArgument& e) {
      throw FormatError("ratings CSV line " + std::to_string(lineno) + ": " + e.what());
    }
  }
  return out;
}

std::string FormatKpiReport(const std::map<std::string, KpiSummary>& summaries) {
  std::string out = "pair,tq,sq,i,n_raters\n";
  for (const auto& [pair, s] : summaries)
    out += pair + "," + s.tq.ToFixed(2) + "," + s.sq.ToFixed(2) + "," + s.i.ToFixed(2) + "," +
           std::to_string(s.n_raters) + "\n";
  return out;
}

std::map<std::string, KpiSummary> ParseKpiReport(const std::string& contents) {
  std::istringstream in(contents);
  std::string line;
  if (!std::getline(in, line) || Trim(line) != "pair,tq,sq,i,n_raters")
    throw FormatError("KPI report header must be 'pair,tq,sq,i,n_raters'");
  std::map<std::string, KpiSummary> out;
  while (std::getline(in, line)) {
    line = Trim(line);
    if (line.empty()) continue;
    auto f = SplitString(line, ',');
    if (f.size() != 5) throw FormatError("KPI report row needs 5 fields: " + line);
    out[f[0]] = {Rational::Parse(f[1]), Rational::Parse(f[2]), Rational::Parse(f[3]),
                 std::stoll(f[4])};
  }
  return out;
}

}  // namespace ssmt
