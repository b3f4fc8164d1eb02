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
#ifndef SSMT_LOADTEST_LOADTEST_H_
#define SSMT_LOADTEST_LOADTEST_H_

#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "ssmt/serving/pool.h"

namespace ssmt {

struct LoadProfile {
  int users = 1;
  double duration_s = 10;
  double think_time_ms = 0;
  double think_jitter_ms = 0;     // think time drawn uniformly from +-jitter
  double warmup_fraction = 0.1;   // requests issued this early are not measured
  std::uint64_t seed = 0;

  void Validate() const;  // InvalidArgument on a malformed profile
};

// Outcome of one request as the virtual user saw it.
struct IssueResult {
  Outcome outcome = Outcome::kOk;
};

// Per-user connection to the system under test.
class LoadSession {
 public:
  virtual ~LoadSession() = default;
  virtual IssueResult Issue() = 0;
};

class LoadTarget {
 public:
  virtual ~LoadTarget() = default;
  // ConnectivityError when the target cannot be reached.
  virtual void Check() = 0;
  virtual std::unique_ptr<LoadSession> NewSession() = 0;
  virtual std::string Describe() const = 0;
};

// Submits work straight to an in-process pool.
class PoolTarget : public LoadTarget {
 public:
  PoolTarget(ReplicaPool& pool, ReplicaPool::Work work);
  void Check() override {}
  std::unique_ptr<LoadSession> NewSession() override;
  std::string Describe() const override;

 private:
  ReplicaPool& pool_;
  ReplicaPool::Work work_;
};

// POSTs a fixed JSON body to a running service; 200 is ok, 503 rejected,
// anything else an error.
class HttpTarget : public LoadTarget {
 public:
  HttpTarget(std::string base_url, std::string path, std::string body);
  void Check() override;
  std::unique_ptr<LoadSession> NewSession() override;
  std::string Describe() const override { return base_url_ + path_; }

 private:
  std::string base_url_;
  std::string path_;
  std::string body_;
};

// Request body used by the CLI and the HTTP load runs: a short codec
// utterance for en -> hi.
nlohmann::json DefaultSsmtPayload();
// Pool work equivalent to DefaultSsmtPayload.
ReplicaPool::Work DefaultPoolWork();

struct LoadRow {
  int users = 0;
  double median_ms = 0;
  double p95_ms = 0;
  double max_ms = 0;
  double throughput_rps = 0;  // measured requests / measured window
  std::int64_t completed = 0;  // measured ok requests
  std::int64_t errors = 0;
  std::int64_t rejected = 0;
  std::int64_t issued = 0;  // every request, warm-up included
  double duration_s = 0;
  bool failed = false;
  std::string failure;
};

// Closed loop: `users` threads each repeat request -> wait -> think until
// duration_s has elapsed, then the in-flight requests drain. Statistics
// cover ok requests issued after the warm-up.
LoadRow RunLoad(LoadTarget& target, const LoadProfile& profile);

struct SweepRow {
  int users = 0;
  LoadRow deployed;
  std::optional<LoadRow> baseline;
};

struct LoadReport {
  std::vector<SweepRow> rows;
  std::uint64_t seed = 0;
  std::string deployed_target;
  std::string baseline_target;
};

struct SweepOptions {
  std::vector<int> levels;  // ascending
  LoadProfile profile;      // users is overridden per level
  // Per-level duration override; profile.duration_s when unset.
  std::function<double(int users)> duration_for;
};

// One run per level against each target. A failing run is reported in its
// row, not raised; unsorted levels are InvalidArgument.
LoadReport Sweep(LoadTarget& deployed, LoadTarget* baseline, const SweepOptions& options);

nlohmann::json LoadRowToJson(const LoadRow& row);
nlohmann::json ReportToJson(const LoadReport& report);
// | Number of Users | Deployed System | Baseline System | with median ms.
std::string ReportToMarkdown(const LoadReport& report);

struct SimulationParams {
  int replicas = 1;
  double service_ms = 100;
  int users = 1;
  double duration_s = 10;
  double think_ms = 0;
  double warmup_fraction = 0.1;
};

struct SimulationResult {
  double median_ms = 0;
  double p95_ms = 0;
  std::int64_t measured = 0;
  std::int64_t issued = 0;
};

// Event-driven closed-loop FIFO queue with deterministic service, users
// issuing at t = 0 in user order. Same measurement rule as RunLoad.
SimulationResult SimulateQueue(const SimulationParams& params);

// Steady-state law of the closed loop with zero think time: ceil(U/R) * s.
double PredictedMedianMs(int replicas, double service_ms, int users);

}  // namespace ssmt

#endif  // SSMT_LOADTEST_LOADTEST_H_
