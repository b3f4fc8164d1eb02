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
#ifndef SSMT_SERVING_POOL_H_
#define SSMT_SERVING_POOL_H_

#include <chrono>
#include <condition_variable>
#include <cstdint>
#include <deque>
#include <functional>
#include <future>
#include <map>
#include <memory>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

#include "ssmt/pipeline/pipeline.h"
#include "ssmt/serving/stats.h"

namespace ssmt {

using SteadyTime = std::chrono::steady_clock::time_point;

struct Replica {
  int id = 0;      // 0 .. G*R-1, device-major
  int device = 0;  // 0 .. G-1
  std::unique_ptr<Pipeline> pipeline;
};

enum class Outcome { kOk, kError, kRejected };

const char* OutcomeName(Outcome o);

struct RequestRecord {
  std::uint64_t id = 0;  // submission order
  SteadyTime enqueue_ts{};
  SteadyTime dispatch_ts{};  // unset for rejected requests
  SteadyTime complete_ts{};
  int replica_id = -1;
  Outcome outcome = Outcome::kOk;
  std::string error;  // what() of the failure, for kError

  double queue_ms() const;
  double service_ms() const;
  double latency_ms() const;  // complete - enqueue
};

// One line of the occupancy log. Events written in the same critical
// section share a section number; invariants are checked between sections.
struct OccupancyEvent {
  enum class Kind { kEnqueue, kStart, kEnd, kReject };
  std::uint64_t section = 0;
  Kind kind = Kind::kEnqueue;
  std::uint64_t request_id = 0;
  int replica_id = -1;
  SteadyTime at{};
};

struct PoolOptions {
  int devices = 1;
  int replicas_per_device = 1;
  std::size_t queue_capacity = 0;  // 0: four times the replica count
  bool record_occupancy = false;
};

using ReplicaFactory = std::function<std::unique_ptr<Pipeline>(int device, int index)>;

// Single global FIFO in front of devices x replicas single-occupancy
// replicas, each driven by its own worker thread. A request goes to the
// lowest-numbered idle replica at once, otherwise waits in the queue; a
// replica finishing a request takes the queue head in the same critical
// section, so no request waits while a replica is idle. A full queue
// rejects.
class ReplicaPool {
 public:
  using Work = std::function<void(Replica&)>;

  // Constructs every replica first; a failing factory raises StartupError
  // naming the device.
  ReplicaPool(PoolOptions options, const ReplicaFactory& factory);
  // Replicas running the default pipeline with the given stage config.
  ReplicaPool(PoolOptions options, const StageConfig& stage);
  ~ReplicaPool();

  ReplicaPool(const ReplicaPool&) = delete;
  ReplicaPool& operator=(const ReplicaPool&) = delete;

  // The future resolves with the terminal record. Exceptions from work give
  // outcome kError. Rejected requests resolve immediately. After Shutdown,
  // raises UnavailableError.
  std::future<RequestRecord> Submit(Work work);

  // Stops accepting, finishes queued and running work, joins the workers.
  void Shutdown();

  int devices() const { return options_.devices; }
  int replicas_per_device() const { return options_.replicas_per_device; }
  int total_replicas() const { return static_cast<int>(replicas_.size()); }
  std::size_t queue_capacity() const { return options_.queue_capacity; }
  std::map<int, int> DeviceMap() const;

  int busy() const;
  std::size_t queued() const;
  LatencyStats Stats() const;
  std::vector<RequestRecord> Records() const;
  std::vector<OccupancyEvent> OccupancyLog() const;

 private:
  struct Pending {
    std::uint64_t id;
    SteadyTime enqueue_ts;
    SteadyTime dispatch_ts;
    Work work;
    std::promise<RequestRecord> done;
  };
  struct Slot {
    Replica replica;
    bool busy = false;
    std::unique_ptr<Pending> job;
    std::condition_variable cv;
    std::thread worker;
  };

  void WorkerLoop(Slot& slot);
  // Caller holds mu_.
  void AssignLocked(Slot& slot, std::unique_ptr<Pending> job, SteadyTime now);
  void LogLocked(OccupancyEvent::Kind kind, std::uint64_t request, int replica, SteadyTime at);

  PoolOptions options_;
  std::vector<std::unique_ptr<Slot>> replicas_;
  mutable std::mutex mu_;
  std::deque<std::unique_ptr<Pending>> queue_;
  bool stopping_ = false;
  std::uint64_t next_id_ = 0;
  std::uint64_t section_ = 0;
  int busy_ = 0;
  std::vector<RequestRecord> records_;
  std::vector<OccupancyEvent> log_;
};

// Checks a pool's records and occupancy log against the scheduling
// invariants; returns one message per violation.
struct InvariantReport {
  std::vector<std::string> violations;
  std::int64_t max_concurrent = 0;
  bool ok() const { return violations.empty(); }
};
InvariantReport CheckPoolInvariants(const std::vector<RequestRecord>& records,
                                    const std::vector<OccupancyEvent>& log, int replicas,
                                    std::uint64_t submitted);

}  // namespace ssmt

#endif  // SSMT_SERVING_POOL_H_
