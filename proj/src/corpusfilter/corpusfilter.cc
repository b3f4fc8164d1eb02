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
#include "ssmt/corpusfilter/corpusfilter.h"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>

#include "ssmt/common/io.h"
#include "ssmt/common/status.h"

namespace ssmt {

namespace {

double Dot(const Embedding& a, const Embedding& b) {
  double s = 0;
  for (std::size_t k = 0; k < a.size(); ++k) s += a[k] * b[k];
  return s;
}

std::vector<double> Norms(const std::vector<Embedding>& v) {
  std::vector<double> n(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) n[i] = std::sqrt(Dot(v[i], v[i]));
  return n;
}

double CosineFromParts(double dot, double na, double nb) {
  if (na == 0 || nb == 0) return 0;
  return std::clamp(dot / (na * nb), -1.0, 1.0);
}

void CheckDims(const std::vector<Embedding>& a, const std::vector<Embedding>& b) {
  std::size_t d = a.empty() ? (b.empty() ? 0 : b[0].size()) : a[0].size();
  for (const auto* side : {&a, &b}) {
    for (const auto& e : *side) {
      if (e.size() != d) throw ProtocolError("embeddings of different dimensions");
    }
  }
}

}  // namespace

double Cosine(const Embedding& a, const Embedding& b, bool* degenerate) {
  if (a.size() != b.size()) throw InvalidArgument("cosine of vectors of different dimensions");
  double na = std::sqrt(Dot(a, a)), nb = std::sqrt(Dot(b, b));
  if (degenerate) *degenerate = (na == 0 || nb == 0);
  return CosineFromParts(Dot(a, b), na, nb);
}

std::vector<ScoredPair> ScorePairs(const std::vector<std::string>& src,
                                   const std::vector<std::string>& tgt, Embedder& embedder) {
  if (src.size() != tgt.size()) {
    throw InvalidArgument("source has " + std::to_string(src.size()) + " lines, target " +
                          std::to_string(tgt.size()));
  }
  if (src.empty()) throw InvalidArgument("empty corpus");
  auto es = embedder.Embed(src);
  auto et = embedder.Embed(tgt);
  CheckDims(es, et);
  std::vector<ScoredPair> out(src.size());
#pragma omp parallel for schedule(static)
  for (std::size_t i = 0; i < src.size(); ++i) {
    out[i].src = src[i];
    out[i].tgt = tgt[i];
    out[i].score = Cosine(es[i], et[i], &out[i].degenerate);
  }
  return out;
}

FilterResult FilterByThreshold(const std::vector<ScoredPair>& pairs, double tau) {
  if (!(tau >= -1.0 && tau <= 1.0)) throw InvalidArgument("tau must lie in [-1, 1]");
  FilterResult r;
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    if (pairs[i].score >= tau) {
      r.kept.push_back(pairs[i]);
      r.kept_indices.push_back(i);
    } else {
      r.dropped.push_back(pairs[i]);
      r.dropped_indices.push_back(i);
    }
  }
  return r;
}

AlignMode ParseAlignMode(const std::string& s) {
  if (s == "argmax") return AlignMode::kArgmax;
  if (s == "one2one") return AlignMode::kOneToOne;
  throw InvalidArgument("unknown align mode '" + s + "' (expected argmax or one2one)");
}

std::string AlignModeName(AlignMode mode) {
  return mode == AlignMode::kArgmax ? "argmax" : "one2one";
}

std::vector<double> ScoreMatrixSerial(const std::vector<Embedding>& a,
                                      const std::vector<Embedding>& b) {
  CheckDims(a, b);
  auto na = Norms(a), nb = Norms(b);
  std::vector<double> m(a.size() * b.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    for (std::size_t j = 0; j < b.size(); ++j) {
      m[i * b.size() + j] = CosineFromParts(Dot(a[i], b[j]), na[i], nb[j]);
    }
  }
  return m;
}

std::vector<double> ScoreMatrix(const std::vector<Embedding>& a, const std::vector<Embedding>& b) {
  CheckDims(a, b);
  auto na = Norms(a), nb = Norms(b);
  const std::size_t rows = a.size(), cols = b.size();
  std::vector<double> m(rows * cols);
  // Each cell is computed by exactly one thread with the same operation
  // order as the serial kernel.
#pragma omp parallel for collapse(2) schedule(static)
  for (std::size_t i = 0; i < rows; ++i) {
    for (std::size_t j = 0; j < cols; ++j) {
      m[i * cols + j] = CosineFromParts(Dot(a[i], b[j]), na[i], nb[j]);
    }
  }
  return m;
}

AlignmentResult AlignScores(const std::vector<double>& scores, std::size_t rows,
                            std::size_t cols, AlignMode mode) {
  if (rows == 0 || cols == 0) throw InvalidArgument("alignment needs nonempty sides");
  if (scores.size() != rows * cols) throw InvalidArgument("score matrix has the wrong size");
  AlignmentResult r;
  r.mode = mode;
  if (mode == AlignMode::kArgmax) {
    r.matches.resize(rows);
#pragma omp parallel for schedule(static)
    for (std::size_t i = 0; i < rows; ++i) {
      std::size_t best = 0;
      for (std::size_t j = 1; j < cols; ++j) {
        if (scores[i * cols + j] > scores[i * cols + best]) best = j;
      }
      r.matches[i] = {i, best, scores[i * cols + best]};
    }
    return r;
  }
  std::vector<std::size_t> order(rows * cols);
  std::iota(order.begin(), order.end(), 0);
  // Flat index order equals (row, col) lexicographic order.
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t x, std::size_t y) { return scores[x] > scores[y]; });
  std::vector<bool> row_used(rows, false), col_used(cols, false);
  std::size_t limit = std::min(rows, cols);
  for (std::size_t cell : order) {
    std::size_t i = cell / cols, j = cell % cols;
    if (row_used[i] || col_used[j]) continue;
    row_used[i] = col_used[j] = true;
    r.matches.push_back({i, j, scores[cell]});
    if (r.matches.size() == limit) break;
  }
  return r;
}

AlignmentResult Realign(const std::vector<std::string>& src, const std::vector<std::string>& tgt,
                        Embedder& embedder, AlignMode mode, std::size_t cell_cap) {
  if (src.empty() || tgt.empty()) throw InvalidArgument("alignment needs nonempty sides");
  if (src.size() > cell_cap / tgt.size()) {
    throw SizeError(std::to_string(src.size()) + " x " + std::to_string(tgt.size()) +
                    " score matrix exceeds the cap of " + std::to_string(cell_cap) +
                    " cells; align the corpus in smaller windows");
  }
  auto es = embedder.Embed(src);
  auto et = embedder.Embed(tgt);
  return AlignScores(ScoreMatrix(es, et), src.size(), tgt.size(), mode);
}

std::string FormatScore(double score) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6f", score);
  std::string s(buf);
  if (s == "-0.000000") s = "0.000000";
  return s;
}

std::string FormatScoreTsv(const std::vector<ScoredPair>& pairs) {
  std::string out;
  for (const auto& p : pairs) {
    out += p.src + '\t' + p.tgt + '\t' + FormatScore(p.score) + '\n';
  }
  return out;
}

std::vector<ScoredPair> ParseScoreTsv(const std::string& tsv) {
  std::vector<ScoredPair> out;
  std::size_t line_no = 0;
  for (const auto& line : SplitString(tsv, '\n')) {
    ++line_no;
    if (line.empty()) continue;
    auto f = SplitString(line, '\t');
    if (f.size() != 3) {
      throw FormatError("score TSV line " + std::to_string(line_no) + ": expected 3 fields");
    }
    ScoredPair p{f[0], f[1], 0, false};
    std::size_t used = 0;
    try {
      p.score = std::stod(f[2], &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used == 0 || used != f[2].size() || p.score < -1 || p.score > 1) {
      throw FormatError("score TSV line " + std::to_string(line_no) + ": bad score '" + f[2] + "'");
    }
    out.push_back(std::move(p));
  }
  return out;
}

}  // namespace ssmt
