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
#include <atomic>
#include <thread>

#include "doctest.h"
#include "httplib.h"
#include "ssmt/common/io.h"
#include "ssmt/common/status.h"
#include "ssmt/serving/http.h"
#include "ssmt/serving/pool.h"
#include "support/audio_oracle.h"
#include "support/temp_dir.h"

using namespace ssmt;
using namespace std::chrono_literals;

namespace {

PoolOptions Grid(int g, int r, std::size_t cap = 0) {
  PoolOptions o;
  o.devices = g;
  o.replicas_per_device = r;
  o.queue_capacity = cap;
  o.record_occupancy = true;
  return o;
}

// Replicas without loaded models, for scheduling tests.
std::unique_ptr<Pipeline> NoPipeline(int, int) { return nullptr; }

ReplicaPool::Work Sleep(std::chrono::milliseconds d) {
  return [d](Replica&) { std::this_thread::sleep_for(d); };
}

}  // namespace

TEST_CASE("pool topology") {
  ReplicaPool deployed(Grid(8, 13), StageConfig::Default());
  CHECK(deployed.total_replicas() == 104);
  CHECK(deployed.queue_capacity() == 416);
  auto map = deployed.DeviceMap();
  CHECK(map.size() == 8);
  for (auto [d, n] : map) CHECK(n == 13);

  ReplicaPool baseline(Grid(1, 1), StageConfig::Default());
  CHECK(baseline.total_replicas() == 1);

  ReplicaPool small(Grid(2, 3), NoPipeline);
  CHECK(small.DeviceMap() == std::map<int, int>{{0, 3}, {1, 3}});

  CHECK_THROWS_AS(ReplicaPool(Grid(0, 3), NoPipeline), InvalidArgument);
}

TEST_CASE("replica construction failure names the device") {
  auto factory = [](int device, int index) -> std::unique_ptr<Pipeline> {
    if (device == 1 && index == 2) throw ConfigError("model missing");
    return nullptr;
  };
  CHECK_THROWS_WITH_AS(ReplicaPool(Grid(2, 3), factory), doctest::Contains("device 1"), StartupError);
}

TEST_CASE("idle replica takes a request at once") {
  ReplicaPool pool(Grid(1, 2), NoPipeline);
  auto rec = pool.Submit(Sleep(1ms)).get();
  CHECK(rec.outcome == Outcome::kOk);
  CHECK(rec.queue_ms() < 5);
  CHECK(rec.replica_id == 0);
}

TEST_CASE("R requests on R replicas run concurrently") {
  ReplicaPool pool(Grid(1, 4), NoPipeline);
  std::vector<std::future<RequestRecord>> f;
  for (int k = 0; k < 4; ++k) f.push_back(pool.Submit(Sleep(60ms)));
  std::set<int> replicas;
  for (auto& x : f) {
    auto r = x.get();
    CHECK(r.queue_ms() < 5);
    replicas.insert(r.replica_id);
  }
  CHECK(replicas.size() == 4);
  auto rep = CheckPoolInvariants(pool.Records(), pool.OccupancyLog(), 4, 4);
  CHECK(rep.ok());
  CHECK(rep.max_concurrent == 4);
}

TEST_CASE("R+1 requests: exactly one waits one service time") {
  ReplicaPool pool(Grid(1, 3), NoPipeline);
  std::vector<std::future<RequestRecord>> f;
  for (int k = 0; k < 4; ++k) f.push_back(pool.Submit(Sleep(100ms)));
  int waited = 0;
  for (auto& x : f) {
    auto r = x.get();
    if (r.queue_ms() > 10) {
      ++waited;
      CHECK(r.queue_ms() == doctest::Approx(100).epsilon(0.2));
      CHECK(r.id == 3);
    }
  }
  CHECK(waited == 1);
}

TEST_CASE("queue overflow is rejected explicitly") {
  ReplicaPool pool(Grid(1, 1, 2), NoPipeline);
  std::vector<std::future<RequestRecord>> f;
  for (int k = 0; k < 5; ++k) f.push_back(pool.Submit(Sleep(30ms)));
  std::vector<Outcome> outcomes;
  for (auto& x : f) outcomes.push_back(x.get().outcome);
  CHECK(outcomes == std::vector<Outcome>{Outcome::kOk, Outcome::kOk, Outcome::kOk, Outcome::kRejected,
                                         Outcome::kRejected});
  auto s = pool.Stats();
  CHECK(s.count == 3);
  CHECK(s.rejected_count == 2);
  CHECK(CheckPoolInvariants(pool.Records(), pool.OccupancyLog(), 1, 5).ok());
}

TEST_CASE("failing work is an error outcome") {
  ReplicaPool pool(Grid(1, 1), NoPipeline);
  auto rec = pool.Submit([](Replica&) { throw InvalidArgument("bad input"); }).get();
  CHECK(rec.outcome == Outcome::kError);
  CHECK(rec.error == "bad input");
  CHECK(pool.Submit(Sleep(0ms)).get().outcome == Outcome::kOk);
  auto s = pool.Stats();
  CHECK(s.count == 2);
  CHECK(s.error_count == 1);
}

TEST_CASE("shutdown drains queued work, then refuses") {
  ReplicaPool pool(Grid(1, 1), NoPipeline);
  std::atomic<int> ran{0};
  std::vector<std::future<RequestRecord>> f;
  for (int k = 0; k < 3; ++k) f.push_back(pool.Submit([&](Replica&) {
    std::this_thread::sleep_for(10ms);
    ++ran;
  }));
  pool.Shutdown();
  CHECK(ran == 3);
  for (auto& x : f) CHECK(x.get().outcome == Outcome::kOk);
  CHECK_THROWS_AS(pool.Submit(Sleep(0ms)), UnavailableError);
}

TEST_CASE("scheduling invariants under concurrent submission") {
  ReplicaPool pool(Grid(2, 3, 300), NoPipeline);
  std::mt19937_64 rng(4);
  std::vector<int> delays(300);
  for (auto& d : delays) d = std::uniform_int_distribution<int>(0, 4)(rng);
  std::vector<std::thread> clients;
  std::atomic<int> next{0};
  for (int t = 0; t < 12; ++t) {
    clients.emplace_back([&] {
      for (int k; (k = next++) < 300;) {
        pool.Submit(Sleep(std::chrono::milliseconds(delays[static_cast<std::size_t>(k)]))).wait();
      }
    });
  }
  for (auto& c : clients) c.join();
  auto rep = CheckPoolInvariants(pool.Records(), pool.OccupancyLog(), 6, 300);
  for (const auto& v : rep.violations) MESSAGE(v);
  CHECK(rep.ok());
  CHECK(rep.max_concurrent <= 6);
}

TEST_CASE("invariant checker catches violations") {
  auto t0 = std::chrono::steady_clock::now();
  using K = OccupancyEvent::Kind;
  auto rec = [&](std::uint64_t id, int replica, int d, int c) {
    RequestRecord r;
    r.id = id;
    r.replica_id = replica;
    r.enqueue_ts = t0;
    r.dispatch_ts = t0 + std::chrono::milliseconds(d);
    r.complete_ts = t0 + std::chrono::milliseconds(c);
    return r;
  };
  // Two requests on one replica at once.
  std::vector<OccupancyEvent> shared{{1, K::kEnqueue, 0, -1, t0}, {1, K::kStart, 0, 0, t0},
                                     {2, K::kEnqueue, 1, -1, t0}, {2, K::kStart, 1, 0, t0}};
  CHECK_FALSE(CheckPoolInvariants({rec(0, 0, 0, 10), rec(1, 0, 5, 10)}, shared, 2, 2).ok());
  // Queued while a replica idles.
  std::vector<OccupancyEvent> idle{{1, K::kEnqueue, 0, -1, t0}};
  CHECK_FALSE(CheckPoolInvariants({}, idle, 1, 0).ok());
  // Out of FIFO order.
  std::vector<OccupancyEvent> unfair{{1, K::kEnqueue, 0, -1, t0}, {1, K::kEnqueue, 1, -1, t0},
                                     {1, K::kStart, 1, 0, t0},    {1, K::kStart, 0, 1, t0}};
  CHECK_FALSE(CheckPoolInvariants({rec(0, 1, 0, 1), rec(1, 0, 0, 1)}, unfair, 2, 2).ok());
  // Lost request.
  CHECK_FALSE(CheckPoolInvariants({rec(0, 0, 0, 1)}, {}, 1, 2).ok());
}

TEST_CASE("latency statistics") {
  std::vector<double> xs{10, 1, 9, 2, 8, 3, 7, 4, 6, 5};
  CHECK(NearestRankPercentile(xs, 0.5) == 5);
  CHECK(NearestRankPercentile(xs, 0.95) == 10);
  CHECK(NearestRankPercentile({42}, 0.5) == 42);
  CHECK(NearestRankPercentile({}, 0.5) == 0);
  auto s = SummarizeLatencies(xs, 2, 1);
  CHECK(s.count == 12);
  CHECK(s.median_ms <= s.p95_ms);
  CHECK(s.p95_ms <= s.max_ms);
  CHECK(s.max_ms == 10);
}

TEST_CASE("base64") {
  CHECK(EncodeBase64("hello") == "aGVsbG8=");
  CHECK(EncodeBase64("") == "");
  CHECK(DecodeBase64("aGVsbG8=") == "hello");
  std::string bin("\0\xff\x10 x", 5);
  CHECK(DecodeBase64(EncodeBase64(bin)) == bin);
  CHECK_THROWS_AS(DecodeBase64("a*b"), FormatError);
}

TEST_CASE("server config") {
  auto c = ServerConfig::FromJson(
      nlohmann::json::parse(R"({"devices": 8, "replicas_per_device": 13, "port": 9000,
                                 "stage": {"service_ms": {"asr": 25}}})"),
      "/");
  CHECK(c.pool.devices == 8);
  CHECK(c.pool.replicas_per_device == 13);
  CHECK(c.pool.queue_capacity == 0);
  CHECK(c.port == 9000);
  CHECK(c.stage.service.asr_ms == 25);
  CHECK_THROWS_AS(ServerConfig::FromJson(nlohmann::json::parse(R"({"gpus": 8})"), "/"), ConfigError);
  CHECK_THROWS_AS(ServerConfig::FromJson(nlohmann::json::parse(R"({"devices": 0})"), "/"), ConfigError);

  testing::TempDir dir;
  WriteFile(dir / "c.json", R"({"replicas_per_device": 2, "stage": {"mt_lexicon_dir": "lex"}})");
  auto loaded = ServerConfig::Load(dir / "c.json");
  CHECK(loaded.stage.mt_lexicon_dir == dir.path() / "lex");
  WriteFile(dir / "bad.json", "{");
  CHECK_THROWS_AS(ServerConfig::Load(dir / "bad.json"), ConfigError);
}

// ---------------------------------------------------------------------------
// HTTP.

namespace {

struct LiveService {
  ReplicaPool pool;
  HttpService http;
  httplib::Client client;

  explicit LiveService(PoolOptions options, StageConfig stage = StageConfig::Default())
      : pool(options, stage), http(pool, std::make_shared<TrigramEmbedder>()), client(Start(http)) {
    client.set_read_timeout(30, 0);
  }

  static std::string Start(HttpService& h) {
    h.Bind("127.0.0.1", 0);
    h.Start();
    return h.url();
  }

  nlohmann::json Post(const std::string& path, const nlohmann::json& body, int expect) {
    auto res = client.Post(path, body.dump(), "application/json");
    REQUIRE(res);
    CHECK(res->status == expect);
    return nlohmann::json::parse(res->body);
  }
};

}  // namespace

TEST_CASE("http health and stats") {
  LiveService svc(Grid(2, 3));
  auto res = svc.client.Get("/api/v1/health");
  REQUIRE(res);
  CHECK(res->status == 200);
  auto j = nlohmann::json::parse(res->body);
  CHECK(j["status"] == "ok");
  CHECK(j["replicas"]["total"] == 6);
  CHECK(j["replicas"]["busy"] == 0);
  CHECK(j["devices"]["1"] == 3);

  auto stats = nlohmann::json::parse(svc.client.Get("/api/v1/stats")->body);
  CHECK(stats["count"] == 0);
}

TEST_CASE("http ssmt end to end") {
  LiveService svc(Grid(1, 2));
  ToneCodec codec;
  auto body = SsmtRequestJson(codec.Synthesize("um hello world", kAsrSampleRate), LangId::kEn, LangId::kHi);
  auto j = svc.Post("/api/v1/ssmt", body, 200);
  CHECK(j["transcript"] == "um hello world");
  CHECK(j["fluent_text"] == "hello world");
  CHECK(j["translation"] == "नमस्ते दुनिया");
  for (const char* k : {"asr", "dc", "mt", "tts", "total"}) CHECK(j["timings_ms"][k].is_number());
  auto audio = ParseWav(DecodeBase64(j["audio_b64"].get<std::string>()));
  CHECK(audio.sample_rate == kTtsSampleRate);
  CHECK(codec.Decode(audio) == "नमस्ते दुनिया");

  auto pivot = svc.Post("/api/v1/ssmt",
                        SsmtRequestJson(codec.SynthesizeSpoken("मेरा दोस्त"), LangId::kHi, LangId::kMr, LangId::kEn),
                        200);
  CHECK(pivot["translation"] == "माझे मित्र");
  CHECK(pivot["pivot_text"] == "my friend");

  auto stats = nlohmann::json::parse(svc.client.Get("/api/v1/stats")->body);
  CHECK(stats["count"] == 2);
}

TEST_CASE("http ssmt errors") {
  LiveService svc(Grid(1, 1));
  ToneCodec codec;
  auto ok = SsmtRequestJson(codec.Synthesize("hello"), LangId::kEn, LangId::kHi);

  auto res = svc.client.Post("/api/v1/ssmt", "{not json", "application/json");
  REQUIRE(res);
  CHECK(res->status == 400);

  auto same = ok;
  same["tgt"] = "en";
  CHECK(svc.Post("/api/v1/ssmt", same, 400)["error"].get<std::string>().find("en") != std::string::npos);
  auto bad_lang = ok;
  bad_lang["src"] = "fr";
  svc.Post("/api/v1/ssmt", bad_lang, 400);
  auto bad_b64 = ok;
  bad_b64["audio_b64"] = "***";
  svc.Post("/api/v1/ssmt", bad_b64, 400);
  auto not_wav = ok;
  not_wav["audio_b64"] = EncodeBase64("hello");
  svc.Post("/api/v1/ssmt", not_wav, 400);

  auto silent = SsmtRequestJson(testing::Silence(200, kAsrSampleRate), LangId::kEn, LangId::kHi);
  auto j = svc.Post("/api/v1/ssmt", silent, 422);
  CHECK(j["stage"] == "asr");
}

TEST_CASE("http ttmt detects the source language") {
  LiveService svc(Grid(1, 1));
  auto j = svc.Post("/api/v1/ttmt", {{"text", "hello"}, {"tgt", "hi"}}, 200);
  CHECK(j["translation"] == "नमस्ते");
  CHECK(j["detected_src"] == "en");
  auto explicit_src = svc.Post("/api/v1/ttmt", {{"text", "नमस्ते"}, {"src", "hi"}, {"tgt", "en"}}, 200);
  CHECK(explicit_src["translation"] == "hello");
  CHECK_FALSE(explicit_src.contains("detected_src"));
  svc.Post("/api/v1/ttmt", {{"text", "1234 !!"}, {"tgt", "hi"}}, 422);
  svc.Post("/api/v1/ttmt", {{"tgt", "hi"}}, 400);
}

TEST_CASE("http filter scoring") {
  LiveService svc(Grid(1, 1));
  auto j = svc.Post("/api/v1/filter/score", {{"src", {"a small house", "x"}}, {"tgt", {"a small house", ""}}}, 200);
  REQUIRE(j["scores"].size() == 2);
  CHECK(j["scores"][0].get<double>() == doctest::Approx(1.0));
  CHECK(j["scores"][1] == 0.0);
  CHECK(j["degenerate"][1] == true);
  svc.Post("/api/v1/filter/score", {{"src", {"a"}}, {"tgt", {"a", "b"}}}, 400);
}

TEST_CASE("http rejects when the queue is full") {
  StageConfig slow = StageConfig::Default();
  slow.service = StageServiceTimes::Uniform(50);
  LiveService svc(Grid(1, 1, 1), slow);
  ToneCodec codec;
  auto body = SsmtRequestJson(codec.Synthesize("hello"), LangId::kEn, LangId::kHi).dump();
  std::vector<int> statuses(4);
  std::vector<std::thread> ts;
  for (int k = 0; k < 4; ++k) {
    ts.emplace_back([&, k] {
      httplib::Client c(svc.http.url());
      c.set_read_timeout(30, 0);
      auto r = c.Post("/api/v1/ssmt", body, "application/json");
      statuses[static_cast<std::size_t>(k)] = r ? r->status : -1;
    });
    std::this_thread::sleep_for(10ms);
  }
  for (auto& t : ts) t.join();
  CHECK(std::count(statuses.begin(), statuses.end(), 200) == 2);
  CHECK(std::count(statuses.begin(), statuses.end(), 503) == 2);
}

TEST_CASE("bind failure is a startup error") {
  ReplicaPool pool(Grid(1, 1), NoPipeline);
  HttpService a(pool, std::make_shared<TrigramEmbedder>());
  int port = a.Bind("127.0.0.1", 0);
  a.Start();
  HttpService b(pool, std::make_shared<TrigramEmbedder>());
  CHECK_THROWS_AS(b.Bind("127.0.0.1", port), StartupError);
}
