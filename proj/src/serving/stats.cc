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
#include "ssmt/serving/stats.h"

#include <algorithm>
#include <cmath>

namespace ssmt {

double NearestRankPercentile(std::vector<double> samples, double p) {
  if (samples.empty()) return 0;
  auto rank = static_cast<std::size_t>(std::ceil(p * static_cast<double>(samples.size())));
  rank = std::clamp<std::size_t>(rank, 1, samples.size());
  std::nth_element(samples.begin(), samples.begin() + static_cast<std::ptrdiff_t>(rank - 1), samples.end());
  return samples[rank - 1];
}

LatencyStats SummarizeLatencies(const std::vector<double>& ok, std::int64_t error_count,
                                std::int64_t rejected_count) {
  LatencyStats s;
  s.count = static_cast<std::int64_t>(ok.size()) + error_count;
  s.error_count = error_count;
  s.rejected_count = rejected_count;
  if (!ok.empty()) {
    s.median_ms = NearestRankPercentile(ok, 0.5);
    s.p95_ms = NearestRankPercentile(ok, 0.95);
    s.max_ms = *std::max_element(ok.begin(), ok.end());
  }
  return s;
}

nlohmann::json StatsToJson(const LatencyStats& s) {
  return {{"count", s.count},           {"median_ms", s.median_ms},
          {"p95_ms", s.p95_ms},         {"max_ms", s.max_ms},
          {"error_count", s.error_count}, {"rejected_count", s.rejected_count}};
}

}  // namespace ssmt
