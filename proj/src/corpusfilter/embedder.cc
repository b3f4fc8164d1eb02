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
#include "ssmt/corpusfilter/embedder.h"

#include <cmath>
#include <thread>

#include "httplib.h"
#include "json.hpp"
#include "ssmt/common/status.h"
#include "ssmt/textprep/text.h"

namespace ssmt {

std::uint32_t Fnv1a32(std::string_view s) {
  std::uint32_t h = 2166136261u;
  for (unsigned char c : s) {
    h ^= c;
    h *= 16777619u;
  }
  return h;
}

TrigramEmbedder::TrigramEmbedder(std::size_t dim) : dim_(dim) {
  if (dim == 0) throw InvalidArgument("embedding dimension must be positive");
}

Embedding TrigramEmbedder::EmbedOne(std::string_view text) const {
  Embedding v(dim_, 0.0);
  auto cps = SplitCodePoints(text);
  if (cps.empty()) return v;
  if (cps.size() < 3) {
    v[Fnv1a32(text) % dim_] += 1.0;
  } else {
    for (std::size_t i = 0; i + 3 <= cps.size(); ++i) {
      std::string gram = cps[i] + cps[i + 1] + cps[i + 2];
      v[Fnv1a32(gram) % dim_] += 1.0;
    }
  }
  double norm = 0;
  for (double x : v) norm += x * x;
  norm = std::sqrt(norm);
  for (double& x : v) x /= norm;
  return v;
}

std::vector<Embedding> TrigramEmbedder::Embed(const std::vector<std::string>& texts) {
  std::vector<Embedding> out;
  out.reserve(texts.size());
  for (const auto& t : texts) out.push_back(EmbedOne(t));
  return out;
}

RemoteEmbedder::RemoteEmbedder(std::string base_url, RemoteEmbedderOptions options)
    : base_url_(std::move(base_url)), options_(options) {
  if (options_.batch_size == 0) throw InvalidArgument("batch size must be positive");
}

std::size_t RemoteEmbedder::dim() const {
  std::lock_guard<std::mutex> lock(mu_);
  return dim_;
}

void RemoteEmbedder::CheckDim(std::size_t dim, std::size_t batch_index) {
  std::lock_guard<std::mutex> lock(mu_);
  if (dim_ == 0) dim_ = dim;
  if (dim != dim_) {
    throw ProtocolError("embedding dimension changed from " + std::to_string(dim_) + " to " +
                        std::to_string(dim) + " in batch " + std::to_string(batch_index));
  }
}

std::vector<Embedding> RemoteEmbedder::EmbedBatch(const std::vector<std::string>& texts,
                                                  std::size_t batch_index) {
  // A client per call keeps concurrent batches independent.
  httplib::Client client(base_url_);
  auto secs = options_.timeout.count() / 1000;
  auto usecs = (options_.timeout.count() % 1000) * 1000;
  client.set_connection_timeout(secs, usecs);
  client.set_read_timeout(secs, usecs);
  client.set_write_timeout(secs, usecs);

  std::string body = nlohmann::json{{"texts", texts}}.dump();
  auto backoff = options_.initial_backoff;
  std::string last_error;
  for (int attempt = 0; attempt <= options_.max_retries; ++attempt) {
    if (attempt > 0) {
      std::this_thread::sleep_for(backoff);
      backoff *= 2;
    }
    auto res = client.Post("/embed", body, "application/json");
    if (!res) {
      last_error = httplib::to_string(res.error());
      continue;
    }
    if (res->status != 200) {
      last_error = "HTTP " + std::to_string(res->status);
      continue;
    }
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(res->body);
    } catch (const nlohmann::json::exception& e) {
      throw ProtocolError(std::string("malformed embedder response: ") + e.what());
    }
    if (!j.contains("embeddings") || !j["embeddings"].is_array() || !j.contains("dim") ||
        !j["dim"].is_number_unsigned()) {
      throw ProtocolError("embedder response lacks embeddings/dim");
    }
    auto dim = j["dim"].get<std::size_t>();
    CheckDim(dim, batch_index);
    const auto& arr = j["embeddings"];
    if (arr.size() != texts.size()) {
      throw ProtocolError("embedder returned " + std::to_string(arr.size()) + " vectors for " +
                          std::to_string(texts.size()) + " texts");
    }
    std::vector<Embedding> out;
    out.reserve(arr.size());
    for (const auto& row : arr) {
      if (!row.is_array() || row.size() != dim) {
        throw ProtocolError("embedding length differs from declared dim " + std::to_string(dim));
      }
      Embedding e;
      e.reserve(dim);
      for (const auto& x : row) {
        if (!x.is_number()) throw ProtocolError("non-numeric embedding component");
        double d = x.get<double>();
        if (!std::isfinite(d)) throw ProtocolError("non-finite embedding component");
        e.push_back(d);
      }
      out.push_back(std::move(e));
    }
    return out;
  }
  throw BackendError("embedder at " + base_url_ + " failed: " + last_error, batch_index);
}

std::vector<Embedding> RemoteEmbedder::Embed(const std::vector<std::string>& texts) {
  if (texts.empty()) throw InvalidArgument("nothing to embed");
  std::vector<Embedding> out;
  out.reserve(texts.size());
  for (std::size_t start = 0, b = 0; start < texts.size(); start += options_.batch_size, ++b) {
    auto end = std::min(texts.size(), start + options_.batch_size);
    std::vector<std::string> batch(texts.begin() + start, texts.begin() + end);
    for (auto& e : EmbedBatch(batch, b)) out.push_back(std::move(e));
  }
  return out;
}

}  // namespace ssmt
