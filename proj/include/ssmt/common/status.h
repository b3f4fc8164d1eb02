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
#ifndef SSMT_COMMON_STATUS_H_
#define SSMT_COMMON_STATUS_H_

#include <cstddef>
#include <stdexcept>
#include <string>

namespace ssmt {

// Base of every domain error raised by the library. The CLI maps these to
// exit code 1; anything else escaping a subcommand is a bug.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class EncodingError : public Error {
 public:
  using Error::Error;
};

class InvalidArgument : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

class FormatError : public Error {
 public:
  using Error::Error;
};

class UndeterminableError : public Error {
 public:
  using Error::Error;
};

class SizeError : public Error {
 public:
  using Error::Error;
};

class UnavailableError : public Error {
 public:
  using Error::Error;
};

// A service or pool could not be brought up.
class StartupError : public Error {
 public:
  using Error::Error;
};

class ConnectivityError : public Error {
 public:
  using Error::Error;
};

// Failure talking to an embedding backend. batch_index identifies the
// batch of the request that failed.
class BackendError : public Error {
 public:
  BackendError(const std::string& what, std::size_t batch_index)
      : Error(what + " (batch " + std::to_string(batch_index) + ")"),
        batch_index_(batch_index) {}
  std::size_t batch_index() const { return batch_index_; }

 private:
  std::size_t batch_index_;
};

class ProtocolError : public Error {
 public:
  using Error::Error;
};

// A cascade stage failed; stage() names it ("asr", "dc", "mt", "tts").
class StageError : public Error {
 public:
  StageError(std::string stage, const std::string& what)
      : Error(stage + ": " + what), stage_(std::move(stage)) {}
  const std::string& stage() const { return stage_; }

 private:
  std::string stage_;
};

}  // namespace ssmt

#endif  // SSMT_COMMON_STATUS_H_
