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
#include "ssmt/serving/pool.h"

#include <algorithm>
#include <set>

#include "ssmt/common/status.h"

namespace ssmt {

namespace {

using Clock = std::chrono::steady_clock;

double Ms(SteadyTime from, SteadyTime to) {
  return std::chrono::duration<double, std::milli>(to - from).count();
}

}  // namespace

const char* OutcomeName(Outcome o) {
  switch (o) {
    case Outcome::kOk:
      return "ok";
    case Outcome::kError:
      return "error";
    case Outcome::kRejected:
      return "rejected";
  }
  return "?";
}

double RequestRecord::queue_ms() const { return outcome == Outcome::kRejected ? 0 : Ms(enqueue_ts, dispatch_ts); }
double RequestRecord::service_ms() const { return outcome == Outcome::kRejected ? 0 : Ms(dispatch_ts, complete_ts); }
double RequestRecord::latency_ms() const { return Ms(enqueue_ts, complete_ts); }

ReplicaPool::ReplicaPool(PoolOptions options, const ReplicaFactory& factory) : options_(options) {
  if (options_.devices < 1 || options_.replicas_per_device < 1) {
    throw InvalidArgument("a pool needs at least one device and one replica per device");
  }
  const int total = options_.devices * options_.replicas_per_device;
  if (options_.queue_capacity == 0) options_.queue_capacity = 4 * static_cast<std::size_t>(total);
  for (int d = 0; d < options_.devices; ++d) {
    for (int r = 0; r < options_.replicas_per_device; ++r) {
      auto slot = std::make_unique<Slot>();
      slot->replica.id = static_cast<int>(replicas_.size());
      slot->replica.device = d;
      try {
        slot->replica.pipeline = factory(d, r);
      } catch (const std::exception& e) {
        throw StartupError("replica " + std::to_string(r) + " on device " + std::to_string(d) +
                           " failed to start: " + e.what());
      }
      replicas_.push_back(std::move(slot));
    }
  }
  for (auto& slot : replicas_) {
    Slot* s = slot.get();
    s->worker = std::thread([this, s] { WorkerLoop(*s); });
  }
}

ReplicaPool::ReplicaPool(PoolOptions options, const StageConfig& stage)
    : ReplicaPool(options, [&stage](int, int) { return std::make_unique<Pipeline>(stage); }) {}

ReplicaPool::~ReplicaPool() { Shutdown(); }

void ReplicaPool::LogLocked(OccupancyEvent::Kind kind, std::uint64_t request, int replica, SteadyTime at) {
  if (options_.record_occupancy) log_.push_back({section_, kind, request, replica, at});
}

void ReplicaPool::AssignLocked(Slot& slot, std::unique_ptr<Pending> job, SteadyTime now) {
  if (!slot.busy) {
    slot.busy = true;
    ++busy_;
  }
  LogLocked(OccupancyEvent::Kind::kStart, job->id, slot.replica.id, now);
  job->dispatch_ts = now;
  slot.job = std::move(job);
  slot.cv.notify_one();
}

std::future<RequestRecord> ReplicaPool::Submit(Work work) {
  std::lock_guard<std::mutex> lock(mu_);
  if (stopping_) throw UnavailableError("replica pool is shut down");
  auto job = std::make_unique<Pending>();
  job->id = next_id_++;
  job->work = std::move(work);
  auto future = job->done.get_future();
  const auto now = Clock::now();
  job->enqueue_ts = now;
  ++section_;
  LogLocked(OccupancyEvent::Kind::kEnqueue, job->id, -1, now);
  for (auto& slot : replicas_) {
    if (!slot->busy) {
      AssignLocked(*slot, std::move(job), now);
      return future;
    }
  }
  if (queue_.size() < options_.queue_capacity) {
    queue_.push_back(std::move(job));
    return future;
  }
  RequestRecord rec;
  rec.id = job->id;
  rec.enqueue_ts = rec.complete_ts = now;
  rec.outcome = Outcome::kRejected;
  rec.error = "queue full";
  LogLocked(OccupancyEvent::Kind::kReject, job->id, -1, now);
  records_.push_back(rec);
  job->done.set_value(rec);
  return future;
}

void ReplicaPool::WorkerLoop(Slot& slot) {
  std::unique_lock<std::mutex> lock(mu_);
  while (true) {
    slot.cv.wait(lock, [&] { return slot.job != nullptr || stopping_; });
    if (!slot.job) return;
    auto job = std::move(slot.job);
    lock.unlock();

    RequestRecord rec;
    rec.id = job->id;
    rec.enqueue_ts = job->enqueue_ts;
    rec.dispatch_ts = job->dispatch_ts;
    rec.replica_id = slot.replica.id;
    try {
      job->work(slot.replica);
      rec.outcome = Outcome::kOk;
    } catch (const std::exception& e) {
      rec.outcome = Outcome::kError;
      rec.error = e.what();
    }

    lock.lock();
    const auto now = Clock::now();
    rec.complete_ts = now;
    ++section_;
    LogLocked(OccupancyEvent::Kind::kEnd, rec.id, slot.replica.id, now);
    records_.push_back(rec);
    if (!queue_.empty()) {
      auto next = std::move(queue_.front());
      queue_.pop_front();
      AssignLocked(slot, std::move(next), now);
    } else {
      slot.busy = false;
      --busy_;
    }
    job->done.set_value(rec);
  }
}

void ReplicaPool::Shutdown() {
  {
    std::lock_guard<std::mutex> lock(mu_);
    stopping_ = true;
    for (auto& slot : replicas_) slot->cv.notify_all();
  }
  for (auto& slot : replicas_) {
    if (slot->worker.joinable()) slot->worker.join();
  }
}

std::map<int, int> ReplicaPool::DeviceMap() const {
  std::map<int, int> m;
  for (const auto& slot : replicas_) ++m[slot->replica.device];
  return m;
}

int ReplicaPool::busy() const {
  std::lock_guard<std::mutex> lock(mu_);
  return busy_;
}

std::size_t ReplicaPool::queued() const {
  std::lock_guard<std::mutex> lock(mu_);
  return queue_.size();
}

LatencyStats ReplicaPool::Stats() const {
  std::lock_guard<std::mutex> lock(mu_);
  std::vector<double> ok;
  std::int64_t errors = 0, rejected = 0;
  for (const auto& r : records_) {
    if (r.outcome == Outcome::kOk) ok.push_back(r.latency_ms());
    if (r.outcome == Outcome::kError) ++errors;
    if (r.outcome == Outcome::kRejected) ++rejected;
  }
  return SummarizeLatencies(ok, errors, rejected);
}

std::vector<RequestRecord> ReplicaPool::Records() const {
  std::lock_guard<std::mutex> lock(mu_);
  return records_;
}

std::vector<OccupancyEvent> ReplicaPool::OccupancyLog() const {
  std::lock_guard<std::mutex> lock(mu_);
  return log_;
}

InvariantReport CheckPoolInvariants(const std::vector<RequestRecord>& records,
                                    const std::vector<OccupancyEvent>& log, int replicas,
                                    std::uint64_t submitted) {
  InvariantReport rep;
  auto fail = [&](std::string msg) { rep.violations.push_back(std::move(msg)); };

  // Conservation: one terminal record per submitted request.
  if (records.size() != submitted) {
    fail(std::to_string(records.size()) + " records for " + std::to_string(submitted) + " submissions");
  }
  std::set<std::uint64_t> ids;
  for (const auto& r : records) {
    if (!ids.insert(r.id).second) fail("request " + std::to_string(r.id) + " has two records");
    if (r.outcome != Outcome::kRejected &&
        !(r.enqueue_ts <= r.dispatch_ts && r.dispatch_ts <= r.complete_ts)) {
      fail("request " + std::to_string(r.id) + " has out-of-order timestamps");
    }
  }

  // Replay the log.
  std::vector<std::int64_t> holder(static_cast<std::size_t>(replicas), -1);
  std::set<std::uint64_t> waiting;
  std::int64_t busy = 0;
  std::int64_t last_started = -1;
  for (std::size_t k = 0; k < log.size(); ++k) {
    const auto& e = log[k];
    const auto rid = static_cast<std::int64_t>(e.request_id);
    switch (e.kind) {
      case OccupancyEvent::Kind::kEnqueue:
        waiting.insert(e.request_id);
        break;
      case OccupancyEvent::Kind::kReject:
        waiting.erase(e.request_id);
        break;
      case OccupancyEvent::Kind::kStart: {
        if (e.replica_id < 0 || e.replica_id >= replicas) {
          fail("start on unknown replica " + std::to_string(e.replica_id));
          break;
        }
        auto& h = holder[static_cast<std::size_t>(e.replica_id)];
        if (h != -1) {
          fail("replica " + std::to_string(e.replica_id) + " given request " + std::to_string(rid) +
               " while serving " + std::to_string(h));
        }
        h = rid;
        ++busy;
        rep.max_concurrent = std::max(rep.max_concurrent, busy);
        if (!waiting.erase(e.request_id)) fail("request " + std::to_string(rid) + " started without enqueue");
        if (rid <= last_started) {
          fail("request " + std::to_string(rid) + " started after request " + std::to_string(last_started));
        }
        last_started = rid;
        break;
      }
      case OccupancyEvent::Kind::kEnd: {
        auto& h = holder[static_cast<std::size_t>(e.replica_id)];
        if (h != rid) fail("replica " + std::to_string(e.replica_id) + " ended a request it did not hold");
        h = -1;
        --busy;
        break;
      }
    }
    bool section_closes = k + 1 == log.size() || log[k + 1].section != e.section;
    if (section_closes && !waiting.empty() && busy < replicas) {
      fail("section " + std::to_string(e.section) + ": " + std::to_string(waiting.size()) +
           " queued while " + std::to_string(replicas - busy) + " replicas idle");
    }
  }

  // Replica intervals from the records must not overlap either.
  std::map<int, std::vector<const RequestRecord*>> per_replica;
  for (const auto& r : records) {
    if (r.outcome != Outcome::kRejected) per_replica[r.replica_id].push_back(&r);
  }
  for (auto& [replica, rs] : per_replica) {
    std::sort(rs.begin(), rs.end(), [](auto* a, auto* b) { return a->dispatch_ts < b->dispatch_ts; });
    for (std::size_t k = 1; k < rs.size(); ++k) {
      if (rs[k]->dispatch_ts < rs[k - 1]->complete_ts) {
        fail("replica " + std::to_string(replica) + " overlaps requests " + std::to_string(rs[k - 1]->id) +
             " and " + std::to_string(rs[k]->id));
      }
    }
  }
  return rep;
}

}  // namespace ssmt
