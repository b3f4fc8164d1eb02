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
#include "ssmt/loadtest/loadtest.h"

#include <cmath>
#include <deque>
#include <iomanip>
#include <mutex>
#include <queue>
#include <random>
#include <sstream>
#include <thread>

#include "httplib.h"
#include "ssmt/common/status.h"
#include "ssmt/serving/http.h"

namespace ssmt {

namespace {

using Clock = std::chrono::steady_clock;

class PoolSession : public LoadSession {
 public:
  PoolSession(ReplicaPool& pool, const ReplicaPool::Work& work) : pool_(pool), work_(work) {}
  IssueResult Issue() override { return {pool_.Submit(work_).get().outcome}; }

 private:
  ReplicaPool& pool_;
  const ReplicaPool::Work& work_;
};

class HttpSession : public LoadSession {
 public:
  HttpSession(const std::string& url, const std::string& path, const std::string& body)
      : client_(url), path_(path), body_(body) {
    client_.set_keep_alive(true);
    client_.set_tcp_nodelay(true);
    client_.set_read_timeout(600, 0);
  }
  IssueResult Issue() override {
    auto res = client_.Post(path_, body_, "application/json");
    if (!res) return {Outcome::kError};
    if (res->status == 200) return {Outcome::kOk};
    if (res->status == 503) return {Outcome::kRejected};
    return {Outcome::kError};
  }

 private:
  httplib::Client client_;
  const std::string& path_;
  const std::string& body_;
};

std::string Fixed(double v, int places) {
  std::ostringstream os;
  os << std::fixed << std::setprecision(places) << v;
  return os.str();
}

}  // namespace

void LoadProfile::Validate() const {
  if (users < 1) throw InvalidArgument("users must be at least 1");
  if (!(duration_s > 0)) throw InvalidArgument("duration must be positive");
  if (think_time_ms < 0 || think_jitter_ms < 0) throw InvalidArgument("think time must be non-negative");
  if (think_jitter_ms > think_time_ms) throw InvalidArgument("think jitter exceeds think time");
  if (warmup_fraction < 0 || warmup_fraction >= 1) throw InvalidArgument("warm-up fraction must be in [0, 1)");
}

PoolTarget::PoolTarget(ReplicaPool& pool, ReplicaPool::Work work) : pool_(pool), work_(std::move(work)) {}

std::unique_ptr<LoadSession> PoolTarget::NewSession() { return std::make_unique<PoolSession>(pool_, work_); }

std::string PoolTarget::Describe() const {
  return "in-process pool " + std::to_string(pool_.devices()) + "x" + std::to_string(pool_.replicas_per_device());
}

HttpTarget::HttpTarget(std::string base_url, std::string path, std::string body)
    : base_url_(std::move(base_url)), path_(std::move(path)), body_(std::move(body)) {}

void HttpTarget::Check() {
  httplib::Client client(base_url_);
  client.set_connection_timeout(2, 0);
  client.set_read_timeout(5, 0);
  auto res = client.Get("/api/v1/health");
  if (!res) {
    throw ConnectivityError("cannot reach " + base_url_ + ": " + httplib::to_string(res.error()));
  }
  if (res->status != 200) {
    throw ConnectivityError(base_url_ + "/api/v1/health answered HTTP " + std::to_string(res->status));
  }
}

std::unique_ptr<LoadSession> HttpTarget::NewSession() {
  return std::make_unique<HttpSession>(base_url_, path_, body_);
}

nlohmann::json DefaultSsmtPayload() {
  return SsmtRequestJson(ToneCodec().Synthesize("a", kAsrSampleRate), LangId::kEn, LangId::kHi);
}

ReplicaPool::Work DefaultPoolWork() {
  auto audio = std::make_shared<Utterance>(ToneCodec().Synthesize("a", kAsrSampleRate));
  return [audio](Replica& r) { r.pipeline->Run(*audio, LangId::kEn, LangId::kHi); };
}

LoadRow RunLoad(LoadTarget& target, const LoadProfile& profile) {
  profile.Validate();
  target.Check();

  std::vector<std::unique_ptr<LoadSession>> sessions;
  sessions.reserve(static_cast<std::size_t>(profile.users));
  for (int u = 0; u < profile.users; ++u) sessions.push_back(target.NewSession());

  struct Sample {
    double latency_ms;
    Outcome outcome;
    bool measured;
  };
  std::mutex mu;
  std::vector<Sample> samples;

  // Leave time for every thread to exist before the clock starts.
  const auto start = Clock::now() + std::chrono::milliseconds(20 + profile.users / 10);
  const auto window = std::chrono::duration<double>(profile.duration_s);
  const auto end = start + std::chrono::duration_cast<Clock::duration>(window);
  const auto warm_end = start + std::chrono::duration_cast<Clock::duration>(window * profile.warmup_fraction);

  std::vector<std::thread> users;
  users.reserve(sessions.size());
  for (int u = 0; u < profile.users; ++u) {
    users.emplace_back([&, u] {
      std::mt19937_64 rng(profile.seed * 1000003u + static_cast<std::uint64_t>(u));
      std::uniform_real_distribution<double> think(profile.think_time_ms - profile.think_jitter_ms,
                                                   profile.think_time_ms + profile.think_jitter_ms);
      std::vector<Sample> local;
      std::this_thread::sleep_until(start);
      while (Clock::now() < end) {
        auto t0 = Clock::now();
        Outcome outcome;
        try {
          outcome = sessions[static_cast<std::size_t>(u)]->Issue().outcome;
        } catch (const std::exception&) {
          outcome = Outcome::kError;
        }
        double ms = std::chrono::duration<double, std::milli>(Clock::now() - t0).count();
        local.push_back({ms, outcome, t0 >= warm_end});
        if (profile.think_time_ms > 0) {
          std::this_thread::sleep_for(std::chrono::duration<double, std::milli>(think(rng)));
        }
      }
      std::lock_guard<std::mutex> lock(mu);
      samples.insert(samples.end(), local.begin(), local.end());
    });
  }
  for (auto& t : users) t.join();

  LoadRow row;
  row.users = profile.users;
  row.duration_s = profile.duration_s;
  row.issued = static_cast<std::int64_t>(samples.size());
  std::vector<double> ok;
  std::int64_t errors = 0, rejected = 0;
  for (const auto& s : samples) {
    if (!s.measured) continue;
    if (s.outcome == Outcome::kOk) ok.push_back(s.latency_ms);
    if (s.outcome == Outcome::kError) ++errors;
    if (s.outcome == Outcome::kRejected) ++rejected;
  }
  auto stats = SummarizeLatencies(ok, errors, rejected);
  row.median_ms = stats.median_ms;
  row.p95_ms = stats.p95_ms;
  row.max_ms = stats.max_ms;
  row.completed = static_cast<std::int64_t>(ok.size());
  row.errors = errors;
  row.rejected = rejected;
  row.throughput_rps = static_cast<double>(ok.size()) / (profile.duration_s * (1 - profile.warmup_fraction));
  return row;
}

LoadReport Sweep(LoadTarget& deployed, LoadTarget* baseline, const SweepOptions& options) {
  if (options.levels.empty()) throw InvalidArgument("no user levels given");
  for (std::size_t k = 0; k < options.levels.size(); ++k) {
    if (options.levels[k] < 1) throw InvalidArgument("user levels must be positive");
    if (k > 0 && options.levels[k] <= options.levels[k - 1]) {
      throw InvalidArgument("user levels must be strictly ascending");
    }
  }
  LoadReport report;
  report.seed = options.profile.seed;
  report.deployed_target = deployed.Describe();
  if (baseline) report.baseline_target = baseline->Describe();
  auto run = [&](LoadTarget& target, int users) {
    LoadProfile p = options.profile;
    p.users = users;
    if (options.duration_for) p.duration_s = options.duration_for(users);
    try {
      return RunLoad(target, p);
    } catch (const Error& e) {
      LoadRow row;
      row.users = users;
      row.failed = true;
      row.failure = e.what();
      return row;
    }
  };
  for (int users : options.levels) {
    SweepRow row;
    row.users = users;
    row.deployed = run(deployed, users);
    if (baseline) row.baseline = run(*baseline, users);
    report.rows.push_back(row);
  }
  return report;
}

nlohmann::json LoadRowToJson(const LoadRow& r) {
  nlohmann::json j = {{"users", r.users},
                      {"median_ms", r.median_ms},
                      {"p95_ms", r.p95_ms},
                      {"max_ms", r.max_ms},
                      {"throughput_rps", r.throughput_rps},
                      {"completed", r.completed},
                      {"errors", r.errors},
                      {"rejected", r.rejected},
                      {"issued", r.issued},
                      {"duration_s", r.duration_s},
                      {"failed", r.failed}};
  if (r.failed) j["failure"] = r.failure;
  return j;
}

nlohmann::json ReportToJson(const LoadReport& report) {
  nlohmann::json rows = nlohmann::json::array();
  for (const auto& r : report.rows) {
    nlohmann::json j = {{"users", r.users}, {"deployed", LoadRowToJson(r.deployed)}};
    if (r.baseline) j["baseline"] = LoadRowToJson(*r.baseline);
    rows.push_back(j);
  }
  nlohmann::json j = {{"seed", report.seed}, {"deployed_target", report.deployed_target}, {"rows", rows}};
  if (!report.baseline_target.empty()) j["baseline_target"] = report.baseline_target;
  return j;
}

std::string ReportToMarkdown(const LoadReport& report) {
  bool with_baseline = !report.rows.empty() && report.rows.front().baseline.has_value();
  auto cell = [](const LoadRow& r) { return r.failed ? std::string("failed") : Fixed(r.median_ms, 0); };
  std::string out = "Median response times (ms), seed " + std::to_string(report.seed) + "\n\n";
  out += with_baseline ? "| Number of Users | Deployed System | Baseline System |\n|---:|---:|---:|\n"
                       : "| Number of Users | Deployed System |\n|---:|---:|\n";
  for (const auto& r : report.rows) {
    out += "| " + std::to_string(r.users) + " | " + cell(r.deployed) + " |";
    if (with_baseline && r.baseline) out += " " + cell(*r.baseline) + " |";
    out += "\n";
  }
  return out;
}

SimulationResult SimulateQueue(const SimulationParams& p) {
  if (p.replicas < 1 || p.users < 1 || !(p.service_ms > 0) || !(p.duration_s > 0) || p.think_ms < 0) {
    throw InvalidArgument("invalid simulation parameters");
  }
  const double end = p.duration_s * 1000;
  const double warm_end = end * p.warmup_fraction;

  // Events ordered by time, then by creation order.
  struct Event {
    double t;
    std::uint64_t seq;
    bool completion;
    int user;
    double issued;
    bool operator>(const Event& o) const { return t != o.t ? t > o.t : seq > o.seq; }
  };
  std::priority_queue<Event, std::vector<Event>, std::greater<>> events;
  std::uint64_t seq = 0;
  for (int u = 0; u < p.users; ++u) events.push({0, seq++, false, u, 0});

  std::deque<std::pair<int, double>> queue;  // (user, issue time)
  int idle = p.replicas;
  SimulationResult r;
  std::vector<double> measured;
  auto start_service = [&](double now, int user, double issued) {
    --idle;
    events.push({now + p.service_ms, seq++, true, user, issued});
  };
  while (!events.empty()) {
    Event e = events.top();
    events.pop();
    if (!e.completion) {
      if (e.t >= end) continue;  // the user stops issuing
      ++r.issued;
      if (idle > 0) {
        start_service(e.t, e.user, e.t);
      } else {
        queue.emplace_back(e.user, e.t);
      }
      continue;
    }
    ++idle;
    if (e.issued >= warm_end) measured.push_back(e.t - e.issued);
    events.push({e.t + p.think_ms, seq++, false, e.user, 0});
    if (!queue.empty()) {
      auto [user, issued] = queue.front();
      queue.pop_front();
      start_service(e.t, user, issued);
    }
  }
  r.measured = static_cast<std::int64_t>(measured.size());
  r.median_ms = NearestRankPercentile(measured, 0.5);
  r.p95_ms = NearestRankPercentile(measured, 0.95);
  return r;
}

double PredictedMedianMs(int replicas, double service_ms, int users) {
  return std::ceil(static_cast<double>(users) / replicas) * service_ms;
}

}  // namespace ssmt
