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
#include "ssmt/pipeline/audio.h"

#include <cstring>

#include "ssmt/common/io.h"
#include "ssmt/common/status.h"

namespace ssmt {

namespace {

void Put16(std::string& out, std::uint16_t v) {
  out.push_back(static_cast<char>(v & 0xFF));
  out.push_back(static_cast<char>(v >> 8));
}

void Put32(std::string& out, std::uint32_t v) {
  for (int k = 0; k < 4; ++k) out.push_back(static_cast<char>((v >> (8 * k)) & 0xFF));
}

std::uint32_t Get(const std::string& b, std::size_t at, int bytes) {
  std::uint32_t v = 0;
  for (int k = bytes - 1; k >= 0; --k) v = (v << 8) | static_cast<unsigned char>(b[at + k]);
  return v;
}

}  // namespace

void ValidateUtterance(const Utterance& u) {
  if (u.sample_rate != kAsrSampleRate && u.sample_rate != kTtsSampleRate) {
    throw InvalidArgument("unsupported sample rate " + std::to_string(u.sample_rate) +
                          " Hz (expected 16000 or 22050)");
  }
}

std::string SerializeWav(const Utterance& u) {
  const std::uint32_t data_bytes = static_cast<std::uint32_t>(u.samples.size() * 2);
  std::string out;
  out.reserve(44 + data_bytes);
  out += "RIFF";
  Put32(out, 36 + data_bytes);
  out += "WAVEfmt ";
  Put32(out, 16);
  Put16(out, 1);  // PCM
  Put16(out, 1);  // mono
  Put32(out, static_cast<std::uint32_t>(u.sample_rate));
  Put32(out, static_cast<std::uint32_t>(u.sample_rate) * 2);
  Put16(out, 2);
  Put16(out, 16);
  out += "data";
  Put32(out, data_bytes);
  for (std::int16_t s : u.samples) Put16(out, static_cast<std::uint16_t>(s));
  return out;
}

Utterance ParseWav(const std::string& b) {
  if (b.size() < 12 || b.compare(0, 4, "RIFF") != 0 || b.compare(8, 4, "WAVE") != 0) {
    throw FormatError("not a RIFF WAVE file");
  }
  bool have_fmt = false;
  Utterance u;
  std::size_t at = 12;
  while (at + 8 <= b.size()) {
    std::string id = b.substr(at, 4);
    std::uint32_t size = Get(b, at + 4, 4);
    std::size_t body = at + 8;
    if (body + size > b.size()) throw FormatError("truncated '" + id + "' chunk");
    if (id == "fmt ") {
      if (size < 16) throw FormatError("short fmt chunk");
      auto format = Get(b, body, 2), channels = Get(b, body + 2, 2), bits = Get(b, body + 14, 2);
      if (format != 1) throw FormatError("WAV is not PCM (format " + std::to_string(format) + ")");
      if (channels != 1) throw FormatError("WAV has " + std::to_string(channels) + " channels; mono required");
      if (bits != 16) throw FormatError("WAV has " + std::to_string(bits) + "-bit samples; 16 required");
      u.sample_rate = static_cast<int>(Get(b, body + 4, 4));
      have_fmt = true;
    } else if (id == "data") {
      if (!have_fmt) throw FormatError("data chunk before fmt chunk");
      if (size % 2 != 0) throw FormatError("odd data chunk size");
      u.samples.resize(size / 2);
      for (std::size_t k = 0; k < u.samples.size(); ++k) {
        u.samples[k] = static_cast<std::int16_t>(Get(b, body + 2 * k, 2));
      }
      return u;
    }
    at = body + size + (size & 1);
  }
  throw FormatError(have_fmt ? "WAV lacks a data chunk" : "WAV lacks a fmt chunk");
}

Utterance ReadWav(const std::filesystem::path& path) { return ParseWav(ReadFile(path)); }

void WriteWav(const std::filesystem::path& path, const Utterance& u) {
  WriteFile(path, SerializeWav(u));
}

}  // namespace ssmt
