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
#ifndef SSMT_PIPELINE_AUDIO_H_
#define SSMT_PIPELINE_AUDIO_H_

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

namespace ssmt {

inline constexpr int kAsrSampleRate = 16000;
inline constexpr int kTtsSampleRate = 22050;

// Mono PCM16 audio.
struct Utterance {
  std::vector<std::int16_t> samples;
  int sample_rate = kTtsSampleRate;

  double duration_ms() const {
    return sample_rate > 0 ? 1000.0 * static_cast<double>(samples.size()) / sample_rate : 0;
  }
};

// Raises InvalidArgument unless the rate is 16000 or 22050 Hz.
void ValidateUtterance(const Utterance& u);

// RIFF WAVE, PCM16, mono. The reader accepts unknown chunks before and
// after "data" and rejects every other sample layout with FormatError.
std::string SerializeWav(const Utterance& u);
Utterance ParseWav(const std::string& bytes);
Utterance ReadWav(const std::filesystem::path& path);
void WriteWav(const std::filesystem::path& path, const Utterance& u);

}  // namespace ssmt

#endif  // SSMT_PIPELINE_AUDIO_H_
