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
#ifndef SSMT_SERVING_HTTP_H_
#define SSMT_SERVING_HTTP_H_

#include <filesystem>
#include <memory>
#include <string>
#include <thread>

#include "json.hpp"
#include "ssmt/corpusfilter/embedder.h"
#include "ssmt/serving/pool.h"

namespace httplib {
class Server;
}

namespace ssmt {

std::string EncodeBase64(const std::string& bytes);
// FormatError on malformed input.
std::string DecodeBase64(const std::string& text);

// {devices, replicas_per_device, queue_capacity, stage: {...}, port, host,
//  embedder_url}. Missing keys keep their defaults; unknown keys are a
// ConfigError.
struct ServerConfig {
  PoolOptions pool;
  StageConfig stage = StageConfig::Default();
  std::string host = "127.0.0.1";
  int port = 8080;
  std::string embedder_url;  // empty: the deterministic trigram embedder

  static ServerConfig FromJson(const nlohmann::json& j, const std::filesystem::path& base_dir);
  static ServerConfig Load(const std::filesystem::path& path);
};

// Translation request body for POST /api/v1/ssmt.
nlohmann::json SsmtRequestJson(const Utterance& audio, LangId src, LangId tgt,
                               std::optional<LangId> pivot = std::nullopt);

// HTTP front end of a replica pool:
//   POST /api/v1/ssmt          {audio_b64, src, tgt, pivot?}
//   POST /api/v1/ttmt          {text, src?, tgt}
//   POST /api/v1/filter/score  {src: [...], tgt: [...]}
//   GET  /api/v1/health, GET /api/v1/stats
// Errors are {"error": message} (plus "stage" for cascade failures) with
// 400 for bad requests, 422 for requests the cascade cannot process, 502
// for embedder failures and 503 when the queue is full or the pool stopped.
class HttpService {
 public:
  HttpService(ReplicaPool& pool, std::shared_ptr<Embedder> embedder);
  ~HttpService();

  // Binds host:port (port 0 picks a free one) and returns the bound port.
  // StartupError when the port cannot be bound.
  int Bind(const std::string& host, int port);
  // Serves on a background thread / on the calling thread until Stop().
  void Start();
  void Run();
  void Stop();
  int port() const { return port_; }
  std::string url() const;

 private:
  void Routes();

  ReplicaPool& pool_;
  std::shared_ptr<Embedder> embedder_;
  std::unique_ptr<httplib::Server> server_;
  std::thread thread_;
  std::string host_ = "127.0.0.1";
  int port_ = -1;
};

}  // namespace ssmt

#endif  // SSMT_SERVING_HTTP_H_
