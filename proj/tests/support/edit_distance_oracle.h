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
#ifndef SSMT_TESTS_SUPPORT_EDIT_DISTANCE_ORACLE_H_
#define SSMT_TESTS_SUPPORT_EDIT_DISTANCE_ORACLE_H_

#include <algorithm>
#include <functional>
#include <map>
#include <random>
#include <string>
#include <utility>
#include <vector>

namespace ssmt::testing {

// Minimal edit distance by memoized recursion over suffixes. Deliberately
// shares nothing with the production DP (which fills prefixes bottom-up).
inline long BruteForceEditDistance(const std::vector<std::string>& a,
                                   const std::vector<std::string>& b) {
  std::map<std::pair<size_t, size_t>, long> memo;
  std::function<long(size_t, size_t)> go = [&](size_t i, size_t j) -> long {
    if (i == a.size()) return static_cast<long>(b.size() - j);
    if (j == b.size()) return static_cast<long>(a.size() - i);
    auto key = std::make_pair(i, j);
    if (auto it = memo.find(key); it != memo.end()) return it->second;
    long best = go(i + 1, j + 1) + (a[i] == b[j] ? 0 : 1);
    best = std::min(best, go(i + 1, j) + 1);
    best = std::min(best, go(i, j + 1) + 1);
    memo[key] = best;
    return best;
  };
  return go(0, 0);
}

inline std::vector<std::string> RandomTokens(std::mt19937_64& rng, size_t min_len,
                                             size_t max_len, int alphabet) {
  std::uniform_int_distribution<size_t> len(min_len, max_len);
  std::uniform_int_distribution<int> sym(0, alphabet - 1);
  std::vector<std::string> out(len(rng));
  for (auto& t : out) t = std::string(1, static_cast<char>('a' + sym(rng)));
  return out;
}

}  // namespace ssmt::testing

#endif  // SSMT_TESTS_SUPPORT_EDIT_DISTANCE_ORACLE_H_
