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
#ifndef SSMT_TESTS_SUPPORT_CORPUS_ORACLE_H_
#define SSMT_TESTS_SUPPORT_CORPUS_ORACLE_H_

#include <algorithm>
#include <numeric>
#include <random>
#include <set>
#include <string>
#include <vector>

namespace ssmt::testing {

// Duplicate-free sentences over a small fixed vocabulary.
inline std::vector<std::string> DistinctSentences(std::size_t n, std::mt19937_64& rng) {
  static const char* words[] = {"river", "stone", "market", "green", "silent", "window",
                                "lamp",  "north", "letter", "copper", "garden", "thunder"};
  std::uniform_int_distribution<int> w(0, 11), len(3, 7);
  std::set<std::string> seen;
  std::vector<std::string> out;
  while (out.size() < n) {
    std::string s;
    for (int k = len(rng); k > 0; --k) s += std::string(s.empty() ? "" : " ") + words[w(rng)];
    if (seen.insert(s).second) out.push_back(s);
  }
  return out;
}

// Exhaustive search over all assignments of an n x n row-major matrix.
// Returns the column chosen for each row and writes the total score.
inline std::vector<std::size_t> BestPermutation(const std::vector<double>& m, std::size_t n, double* total) {
  std::vector<std::size_t> perm(n), best;
  std::iota(perm.begin(), perm.end(), 0);
  double best_total = -1e300;
  do {
    double t = 0;
    for (std::size_t i = 0; i < n; ++i) t += m[i * n + perm[i]];
    if (t > best_total) best_total = t, best = perm;
  } while (std::next_permutation(perm.begin(), perm.end()));
  if (total) *total = best_total;
  return best;
}

}  // namespace ssmt::testing

#endif  // SSMT_TESTS_SUPPORT_CORPUS_ORACLE_H_
