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
#ifndef SSMT_CORPUSFILTER_EMBEDDER_H_
#define SSMT_CORPUSFILTER_EMBEDDER_H_

#include <chrono>
#include <cstddef>
#include <cstdint>
#include <mutex>
#include <string>
#include <string_view>
#include <vector>

namespace ssmt {

using Embedding = std::vector<double>;

// Sentence-embedding backend. Implementations return one vector per input
// text, in input order, and must be safe to call from several threads.
class Embedder {
 public:
  virtual ~Embedder() = default;
  virtual std::vector<Embedding> Embed(const std::vector<std::string>& texts) = 0;
  // 0 until known (a remote backend learns it from its first response).
  virtual std::size_t dim() const = 0;
};

// 32-bit FNV-1a over the bytes of s.
std::uint32_t Fnv1a32(std::string_view s);

// Deterministic stand-in for LaBSE: histogram of code-point trigrams hashed
// into `dim` buckets with FNV-1a, L2-normalized. Texts shorter than three
// code points contribute themselves as a single gram; the empty text maps to
// the zero vector. Texts are used as given, without normalization.
class TrigramEmbedder : public Embedder {
 public:
  static constexpr std::size_t kDefaultDim = 256;

  explicit TrigramEmbedder(std::size_t dim = kDefaultDim);
  std::vector<Embedding> Embed(const std::vector<std::string>& texts) override;
  std::size_t dim() const override { return dim_; }

  Embedding EmbedOne(std::string_view text) const;

 private:
  std::size_t dim_;
};

struct RemoteEmbedderOptions {
  std::size_t batch_size = 32;
  int max_retries = 3;  // retries after the first attempt
  std::chrono::milliseconds initial_backoff{200};
  std::chrono::milliseconds timeout{10000};
};

// Client for an embedding service speaking
//   POST /embed {"texts": [...]}  ->  {"embeddings": [[...], ...], "dim": N}
// Texts are sent in batches; a batch that still fails after the retries
// raises BackendError naming it. Every response must agree with the
// dimension seen first in the session, otherwise ProtocolError.
class RemoteEmbedder : public Embedder {
 public:
  // base_url like "http://127.0.0.1:8081".
  explicit RemoteEmbedder(std::string base_url, RemoteEmbedderOptions options = {});

  std::vector<Embedding> Embed(const std::vector<std::string>& texts) override;
  std::size_t dim() const override;

 private:
  std::vector<Embedding> EmbedBatch(const std::vector<std::string>& texts,
                                    std::size_t batch_index);
  void CheckDim(std::size_t dim, std::size_t batch_index);

  std::string base_url_;
  RemoteEmbedderOptions options_;
  mutable std::mutex mu_;
  std::size_t dim_ = 0;
};

}  // namespace ssmt

#endif  // SSMT_CORPUSFILTER_EMBEDDER_H_
