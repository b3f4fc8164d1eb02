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
#ifndef SSMT_SERVING_STATS_H_
#define SSMT_SERVING_STATS_H_

#include <cstdint>
#include <vector>

#include "json.hpp"

namespace ssmt {

struct LatencyStats {
  std::int64_t count = 0;  // ok + error
  double median_ms = 0;
  double p95_ms = 0;
  double max_ms = 0;
  std::int64_t error_count = 0;
  std::int64_t rejected_count = 0;
};

// Nearest-rank percentile (the ceil(p * n)-th smallest sample) of an
// unsorted sample; 0 for an empty sample. p in (0, 1].
double NearestRankPercentile(std::vector<double> samples, double p);

// Latency samples are over successful requests only.
LatencyStats SummarizeLatencies(const std::vector<double>& ok_latencies_ms,
                                std::int64_t error_count, std::int64_t rejected_count);

nlohmann::json StatsToJson(const LatencyStats& s);

}  // namespace ssmt

#endif  // SSMT_SERVING_STATS_H_
