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
#ifndef SSMT_CORPUSFILTER_CORPUSFILTER_H_
#define SSMT_CORPUSFILTER_CORPUSFILTER_H_

#include <cstddef>
#include <string>
#include <vector>

#include "ssmt/corpusfilter/embedder.h"

namespace ssmt {

struct ScoredPair {
  std::string src;
  std::string tgt;
  double score = 0;         // cosine, clamped to [-1, 1]
  bool degenerate = false;  // an operand was the zero vector; score is 0
};

// Cosine similarity. A zero operand yields 0 and sets *degenerate.
double Cosine(const Embedding& a, const Embedding& b, bool* degenerate = nullptr);

// Scores line-aligned pairs. Lists must be nonempty and equally long.
std::vector<ScoredPair> ScorePairs(const std::vector<std::string>& src,
                                   const std::vector<std::string>& tgt, Embedder& embedder);

struct FilterResult {
  std::vector<ScoredPair> kept;  // score >= tau, input order
  std::vector<ScoredPair> dropped;
  std::vector<std::size_t> kept_indices;
  std::vector<std::size_t> dropped_indices;
};

// tau outside [-1, 1] is rejected with InvalidArgument.
FilterResult FilterByThreshold(const std::vector<ScoredPair>& pairs, double tau);

enum class AlignMode { kArgmax, kOneToOne };

AlignMode ParseAlignMode(const std::string& s);  // "argmax" | "one2one"
std::string AlignModeName(AlignMode mode);

struct AlignMatch {
  std::size_t src_index = 0;
  std::size_t tgt_index = 0;
  double score = 0;
};

struct AlignmentResult {
  std::vector<AlignMatch> matches;  // argmax: by src index; one2one: pick order
  AlignMode mode = AlignMode::kArgmax;
};

inline constexpr std::size_t kDefaultAlignCellCap = 10'000'000;

// Row-major |a| x |b| cosine matrix. The parallel kernel and the serial
// reference produce bit-identical results.
std::vector<double> ScoreMatrix(const std::vector<Embedding>& a, const std::vector<Embedding>& b);
std::vector<double> ScoreMatrixSerial(const std::vector<Embedding>& a,
                                      const std::vector<Embedding>& b);

// Alignment over a precomputed row-major matrix.
//   argmax:  per row, the best column; ties to the smallest column.
//   one2one: greedy global; repeatedly take the highest remaining cell, ties
//            to the smallest (row, col), until one side is exhausted.
AlignmentResult AlignScores(const std::vector<double>& scores, std::size_t rows,
                            std::size_t cols, AlignMode mode);

// Embeds both sides and aligns. Raises SizeError when |src|*|tgt| exceeds
// cell_cap; split the corpus into windows in that case.
AlignmentResult Realign(const std::vector<std::string>& src, const std::vector<std::string>& tgt,
                        Embedder& embedder, AlignMode mode,
                        std::size_t cell_cap = kDefaultAlignCellCap);

// Six decimals. printf-style rounding of the binary value, which resolves
// exact ties to even.
std::string FormatScore(double score);

// `src<TAB>tgt<TAB>score` lines.
std::string FormatScoreTsv(const std::vector<ScoredPair>& pairs);
std::vector<ScoredPair> ParseScoreTsv(const std::string& tsv);

}  // namespace ssmt

#endif  // SSMT_CORPUSFILTER_CORPUSFILTER_H_
