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
#ifndef SSMT_PIPELINE_CODEC_H_
#define SSMT_PIPELINE_CODEC_H_

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

#include "ssmt/pipeline/audio.h"

namespace ssmt {

struct CodecParams {
  double segment_ms = 60;
  double amplitude = 0.5;  // fraction of full scale
  double ramp_ms = 5;
  double base_hz = 400;
  double step_hz = 80;
  double gate = 0.1;          // RMS, fraction of full scale, marking a tone
  double min_purity = 0.5;    // share of segment energy in the best bin
  double analysis_share = 0.8;  // central part of a segment that is analysed
};

// A detected tone segment: [begin, begin + length) in samples.
struct CodecSegment {
  std::size_t begin = 0;
  std::size_t length = 0;
};

// Reversible symbol <-> tone mapping standing in for neural ASR/TTS. Text
// symbols are a-z, 0-9, space and the punctuation ' . , ? ! -; symbol k is
// a sine at base_hz + k * step_hz. One further tone, the escape, lets the
// speech stages carry arbitrary BMP characters as escape + 4 hex digits.
class ToneCodec {
 public:
  static constexpr char kUnknown = '?';

  explicit ToneCodec(CodecParams params = {});

  static const std::string& Alphabet();
  static bool InAlphabet(char c);
  // Index of c in the alphabet; UnsupportedSymbol if absent.
  static int SymbolIndex(std::string_view c);
  int symbol_count() const { return static_cast<int>(Alphabet().size()) + 1; }
  int escape_index() const { return static_cast<int>(Alphabet().size()); }
  double FrequencyHz(int index) const { return params_.base_hz + index * params_.step_hz; }
  std::size_t SegmentSamples(int sample_rate) const;
  const CodecParams& params() const { return params_; }

  // Strict: every character must be in the alphabet, otherwise
  // InvalidArgument naming the offending character.
  Utterance Synthesize(std::string_view text, int sample_rate = kTtsSampleRate) const;
  // Lenient: characters outside the alphabet are escaped.
  Utterance SynthesizeSpoken(std::string_view text, int sample_rate = kTtsSampleRate) const;

  // Inverse of both synthesizers. Silence decodes to "", unclassifiable
  // segments to '?', malformed escapes to '?'.
  std::string Decode(const Utterance& audio) const;

  // Building blocks, public for testing and benchmarking.
  std::vector<int> TextToSymbols(std::string_view text, bool escape) const;
  std::string SymbolsToText(const std::vector<int>& symbols) const;
  Utterance SynthesizeSymbols(const std::vector<int>& symbols, int sample_rate) const;
  std::vector<CodecSegment> FindSegments(const Utterance& audio) const;
  // -1 marks a rejected segment. Parallel and serial versions agree exactly.
  std::vector<int> ClassifySegments(const Utterance& audio,
                                    const std::vector<CodecSegment>& segments) const;
  std::vector<int> ClassifySegmentsSerial(const Utterance& audio,
                                          const std::vector<CodecSegment>& segments) const;
  int ClassifySegment(const Utterance& audio, const CodecSegment& segment) const;

 private:
  CodecParams params_;
};

}  // namespace ssmt

#endif  // SSMT_PIPELINE_CODEC_H_
