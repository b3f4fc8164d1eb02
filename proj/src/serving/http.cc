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
#include "ssmt/serving/http.h"

#include <sodium.h>

#include "httplib.h"
#include "ssmt/common/io.h"
#include "ssmt/common/status.h"
#include "ssmt/corpusfilter/corpusfilter.h"

namespace ssmt {

namespace {

using nlohmann::json;

// Thrown inside handlers to produce a specific status.
struct HttpFailure {
  int status;
  std::string message;
  std::string stage;
};

json ParseBody(const httplib::Request& req) {
  try {
    auto j = json::parse(req.body);
    if (!j.is_object()) throw HttpFailure{400, "request body must be a JSON object", ""};
    return j;
  } catch (const json::exception& e) {
    throw HttpFailure{400, std::string("malformed JSON: ") + e.what(), ""};
  }
}

std::string RequireString(const json& j, const char* key) {
  if (!j.contains(key) || !j[key].is_string()) {
    throw HttpFailure{400, std::string("'") + key + "' must be a string", ""};
  }
  return j[key].get<std::string>();
}

LangId RequireLang(const json& j, const char* key) {
  try {
    return ParseLang(RequireString(j, key));
  } catch (const Error& e) {
    throw HttpFailure{400, e.what(), ""};
  }
}

std::optional<LangId> OptionalLang(const json& j, const char* key) {
  if (!j.contains(key) || j[key].is_null()) return std::nullopt;
  return RequireLang(j, key);
}

std::vector<std::string> RequireStrings(const json& j, const char* key) {
  if (!j.contains(key) || !j[key].is_array()) {
    throw HttpFailure{400, std::string("'") + key + "' must be an array of strings", ""};
  }
  std::vector<std::string> out;
  for (const auto& v : j[key]) {
    if (!v.is_string()) throw HttpFailure{400, std::string("'") + key + "' must be an array of strings", ""};
    out.push_back(v.get<std::string>());
  }
  return out;
}

void Reply(httplib::Response& res, int status, const json& body) {
  res.status = status;
  res.set_content(body.dump(), "application/json");
}

// Runs a handler body, mapping failures onto status codes.
template <typename Fn>
void Guard(httplib::Response& res, Fn&& fn) {
  try {
    fn();
  } catch (const HttpFailure& f) {
    json body = {{"error", f.message}};
    if (!f.stage.empty()) body["stage"] = f.stage;
    Reply(res, f.status, body);
  } catch (const UnavailableError& e) {
    Reply(res, 503, {{"error", e.what()}});
  } catch (const BackendError& e) {
    Reply(res, 502, {{"error", e.what()}});
  } catch (const ProtocolError& e) {
    Reply(res, 502, {{"error", e.what()}});
  } catch (const Error& e) {
    Reply(res, 400, {{"error", e.what()}});
  } catch (const std::exception& e) {
    Reply(res, 500, {{"error", e.what()}});
  }
}

// Runs work on the pool and waits. Failures inside the work are rethrown
// here from the captured exception so their types survive.
void RunOnPool(ReplicaPool& pool, const std::function<void(Replica&)>& work) {
  std::exception_ptr failure;
  auto record = pool
                    .Submit([&](Replica& r) {
                      try {
                        work(r);
                      } catch (...) {
                        failure = std::current_exception();
                        throw;
                      }
                    })
                    .get();
  if (record.outcome == Outcome::kRejected) throw HttpFailure{503, "queue full", ""};
  if (failure) {
    try {
      std::rethrow_exception(failure);
    } catch (const StageError& e) {
      throw HttpFailure{422, e.what(), e.stage()};
    } catch (const UndeterminableError& e) {
      throw HttpFailure{422, e.what(), ""};
    }
  }
}

}  // namespace

std::string EncodeBase64(const std::string& bytes) {
  const auto variant = sodium_base64_VARIANT_ORIGINAL;
  std::string out(sodium_base64_encoded_len(bytes.size(), variant), '\0');
  sodium_bin2base64(out.data(), out.size(), reinterpret_cast<const unsigned char*>(bytes.data()), bytes.size(),
                    variant);
  out.resize(out.size() - 1);  // drop the terminating NUL
  return out;
}

std::string DecodeBase64(const std::string& text) {
  std::string out(text.size() / 4 * 3 + 3, '\0');
  std::size_t len = 0;
  const char* end = nullptr;
  if (sodium_base642bin(reinterpret_cast<unsigned char*>(out.data()), out.size(), text.data(), text.size(),
                        " \t\r\n", &len, &end, sodium_base64_VARIANT_ORIGINAL) != 0 ||
      end != text.data() + text.size()) {
    throw FormatError("malformed base64");
  }
  out.resize(len);
  return out;
}

ServerConfig ServerConfig::FromJson(const json& j, const std::filesystem::path& base_dir) {
  if (!j.is_object()) throw ConfigError("server config must be a JSON object");
  static const char* kKnown[] = {"devices", "replicas_per_device", "queue_capacity", "stage",
                                 "port",    "host",                "embedder_url"};
  for (const auto& [key, value] : j.items()) {
    if (std::find(std::begin(kKnown), std::end(kKnown), key) == std::end(kKnown)) {
      throw ConfigError("unknown key '" + key + "' in server config");
    }
  }
  ServerConfig c;
  auto count = [&](const char* key, auto fallback) {
    if (!j.contains(key)) return static_cast<decltype(fallback)>(fallback);
    if (!j[key].is_number_integer() || j[key].get<long long>() < 0) {
      throw ConfigError(std::string("'") + key + "' must be a non-negative integer");
    }
    return j[key].get<decltype(fallback)>();
  };
  c.pool.devices = count("devices", 1);
  c.pool.replicas_per_device = count("replicas_per_device", 1);
  c.pool.queue_capacity = count("queue_capacity", std::size_t{0});
  c.port = count("port", 8080);
  if (c.pool.devices < 1 || c.pool.replicas_per_device < 1) {
    throw ConfigError("devices and replicas_per_device must be at least 1");
  }
  if (c.port > 65535) throw ConfigError("port out of range");
  if (j.contains("host")) c.host = j["host"].get<std::string>();
  if (j.contains("embedder_url")) c.embedder_url = j["embedder_url"].get<std::string>();
  if (j.contains("stage")) c.stage = StageConfig::FromJson(j["stage"], base_dir);
  return c;
}

ServerConfig ServerConfig::Load(const std::filesystem::path& path) {
  json j;
  try {
    j = json::parse(ReadFile(path));
  } catch (const json::exception& e) {
    throw ConfigError(path.string() + ": " + e.what());
  }
  return FromJson(j, path.parent_path());
}

json SsmtRequestJson(const Utterance& audio, LangId src, LangId tgt, std::optional<LangId> pivot) {
  json j = {{"audio_b64", EncodeBase64(SerializeWav(audio))}, {"src", LangCode(src)}, {"tgt", LangCode(tgt)}};
  if (pivot) j["pivot"] = LangCode(*pivot);
  return j;
}

HttpService::HttpService(ReplicaPool& pool, std::shared_ptr<Embedder> embedder)
    : pool_(pool), embedder_(std::move(embedder)), server_(std::make_unique<httplib::Server>()) {
  if (sodium_init() < 0) throw StartupError("libsodium failed to initialise");
  // Enough handler threads that every replica and queue slot can be
  // occupied while health and stats stay responsive.
  const std::size_t threads = static_cast<std::size_t>(pool_.total_replicas()) + pool_.queue_capacity() + 8;
  server_->new_task_queue = [threads] { return new httplib::ThreadPool(threads); };
  // httplib's default adds SO_REUSEPORT, which would let a second server
  // share the port silently instead of failing to bind.
  server_->set_socket_options([](socket_t sock) {
    int yes = 1;
    setsockopt(sock, SOL_SOCKET, SO_REUSEADDR, &yes, sizeof(yes));
  });
  server_->set_tcp_nodelay(true);
  Routes();
}

HttpService::~HttpService() { Stop(); }

int HttpService::Bind(const std::string& host, int port) {
  host_ = host;
  if (port == 0) {
    port_ = server_->bind_to_any_port(host);
  } else {
    port_ = server_->bind_to_port(host, port) ? port : -1;
  }
  if (port_ < 0) throw StartupError("cannot bind " + host + ":" + std::to_string(port));
  return port_;
}

void HttpService::Start() {
  thread_ = std::thread([this] { server_->listen_after_bind(); });
  server_->wait_until_ready();
}

void HttpService::Run() { server_->listen_after_bind(); }

void HttpService::Stop() {
  if (server_) server_->stop();
  if (thread_.joinable()) thread_.join();
}

std::string HttpService::url() const { return "http://" + host_ + ":" + std::to_string(port_); }

void HttpService::Routes() {
  server_->Post("/api/v1/ssmt", [this](const httplib::Request& req, httplib::Response& res) {
    Guard(res, [&] {
      auto body = ParseBody(req);
      PipelineConfig route;
      route.src = RequireLang(body, "src");
      route.tgt = RequireLang(body, "tgt");
      route.pivot = OptionalLang(body, "pivot");
      route.Validate();
      auto audio = ParseWav(DecodeBase64(RequireString(body, "audio_b64")));
      ValidateUtterance(audio);
      StageTrace trace;
      RunOnPool(pool_, [&](Replica& r) { trace = r.pipeline->Run(audio, route); });
      auto out = TraceToJson(trace);
      out["audio_b64"] = EncodeBase64(SerializeWav(trace.audio));
      Reply(res, 200, out);
    });
  });

  server_->Post("/api/v1/ttmt", [this](const httplib::Request& req, httplib::Response& res) {
    Guard(res, [&] {
      auto body = ParseBody(req);
      auto text = RequireString(body, "text");
      auto src = OptionalLang(body, "src");
      auto tgt = RequireLang(body, "tgt");
      TextTranslation t;
      RunOnPool(pool_, [&](Replica& r) { t = r.pipeline->TranslateText(text, src, tgt); });
      json out = {{"translation", t.translation}, {"src", LangCode(t.src)}, {"timing_ms", t.timing_ms}};
      if (t.detected) out["detected_src"] = LangCode(t.src);
      Reply(res, 200, out);
    });
  });

  server_->Post("/api/v1/filter/score", [this](const httplib::Request& req, httplib::Response& res) {
    Guard(res, [&] {
      auto body = ParseBody(req);
      auto pairs = ScorePairs(RequireStrings(body, "src"), RequireStrings(body, "tgt"), *embedder_);
      json scores = json::array(), degenerate = json::array();
      for (const auto& p : pairs) {
        scores.push_back(p.score);
        degenerate.push_back(p.degenerate);
      }
      Reply(res, 200, {{"scores", scores}, {"degenerate", degenerate}});
    });
  });

  server_->Get("/api/v1/health", [this](const httplib::Request&, httplib::Response& res) {
    json devices = json::object();
    for (auto [d, n] : pool_.DeviceMap()) devices[std::to_string(d)] = n;
    Reply(res, 200,
          {{"status", "ok"},
           {"replicas", {{"total", pool_.total_replicas()}, {"busy", pool_.busy()}}},
           {"devices", devices},
           {"queue", {{"length", pool_.queued()}, {"capacity", pool_.queue_capacity()}}}});
  });

  server_->Get("/api/v1/stats", [this](const httplib::Request&, httplib::Response& res) {
    Reply(res, 200, StatsToJson(pool_.Stats()));
  });
}

}  // namespace ssmt
