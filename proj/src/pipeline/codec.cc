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
#include "ssmt/pipeline/codec.h"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <numbers>

#include "ssmt/common/status.h"
#include "ssmt/textprep/text.h"

namespace ssmt {

namespace {

constexpr double kFullScale = 32768.0;

double Sample(const Utterance& u, std::size_t i) { return u.samples[i] / kFullScale; }

double Rms(const Utterance& u, std::size_t begin, std::size_t end) {
  if (end <= begin) return 0;
  double s = 0;
  for (std::size_t i = begin; i < end; ++i) s += Sample(u, i) * Sample(u, i);
  return std::sqrt(s / static_cast<double>(end - begin));
}

// Windows are reused across segments of the same length.
const std::vector<double>& HannWindow(std::size_t m) {
  thread_local std::map<std::size_t, std::vector<double>> cache;
  auto& w = cache[m];
  if (w.empty()) {
    w.resize(m);
    for (std::size_t k = 0; k < m; ++k) {
      w[k] = 0.5 * (1 - std::cos(2 * std::numbers::pi * static_cast<double>(k) / static_cast<double>(m - 1)));
    }
  }
  return w;
}

int HexValue(char c) {
  if (c >= '0' && c <= '9') return c - '0';
  if (c >= 'a' && c <= 'f') return c - 'a' + 10;
  return -1;
}

}  // namespace

ToneCodec::ToneCodec(CodecParams params) : params_(params) {
  if (params_.segment_ms <= 2 * params_.ramp_ms) throw ConfigError("codec segment shorter than its ramps");
  if (params_.amplitude <= 0 || params_.amplitude > 1) throw ConfigError("codec amplitude outside (0, 1]");
  if (params_.step_hz <= 0 || params_.base_hz <= 0) throw ConfigError("codec frequencies must be positive");
  if (FrequencyHz(symbol_count() - 1) >= kAsrSampleRate / 2.0) {
    throw ConfigError("codec frequency table exceeds the 16 kHz Nyquist limit");
  }
}

const std::string& ToneCodec::Alphabet() {
  static const std::string kAlphabet = "abcdefghijklmnopqrstuvwxyz0123456789 '.,?!-";
  return kAlphabet;
}

bool ToneCodec::InAlphabet(char c) { return Alphabet().find(c) != std::string::npos; }

int ToneCodec::SymbolIndex(std::string_view c) {
  if (c.size() == 1) {
    auto at = Alphabet().find(c[0]);
    if (at != std::string::npos) return static_cast<int>(at);
  }
  throw InvalidArgument("unsupported symbol '" + std::string(c) + "'");
}

std::size_t ToneCodec::SegmentSamples(int sample_rate) const {
  return static_cast<std::size_t>(std::lround(sample_rate * params_.segment_ms / 1000.0));
}

std::vector<int> ToneCodec::TextToSymbols(std::string_view text, bool escape) const {
  std::vector<int> out;
  for (char32_t cp : DecodeUtf8(text)) {
    if (cp < 0x80 && InAlphabet(static_cast<char>(cp))) {
      out.push_back(static_cast<int>(Alphabet().find(static_cast<char>(cp))));
      continue;
    }
    std::string shown = EncodeUtf8(std::u32string(1, cp));
    char code[16];
    std::snprintf(code, sizeof code, "%04x", static_cast<unsigned>(cp));
    if (!escape || cp > 0xFFFF) {
      throw InvalidArgument("unsupported symbol '" + shown + "' (U+" + code + ")");
    }
    out.push_back(escape_index());
    for (int k = 0; k < 4; ++k) out.push_back(static_cast<int>(Alphabet().find(code[k])));
  }
  return out;
}

std::string ToneCodec::SymbolsToText(const std::vector<int>& symbols) const {
  std::string out;
  for (std::size_t i = 0; i < symbols.size(); ++i) {
    int s = symbols[i];
    if (s == escape_index()) {
      char32_t cp = 0;
      bool ok = i + 4 < symbols.size();
      for (std::size_t k = 1; ok && k <= 4; ++k) {
        int d = symbols[i + k];
        int v = (d >= 0 && d < escape_index()) ? HexValue(Alphabet()[d]) : -1;
        if (v < 0) ok = false;
        cp = cp * 16 + static_cast<char32_t>(v);
      }
      if (ok && !(cp >= 0xD800 && cp <= 0xDFFF)) {
        out += EncodeUtf8(std::u32string(1, cp));
        i += 4;
      } else {
        out.push_back(kUnknown);
      }
    } else if (s >= 0 && s < escape_index()) {
      out.push_back(Alphabet()[s]);
    } else {
      out.push_back(kUnknown);
    }
  }
  return out;
}

Utterance ToneCodec::SynthesizeSymbols(const std::vector<int>& symbols, int sample_rate) const {
  Utterance u;
  u.sample_rate = sample_rate;
  ValidateUtterance(u);
  const std::size_t len = SegmentSamples(sample_rate);
  const double ramp = sample_rate * params_.ramp_ms / 1000.0;
  std::vector<double> envelope(len, 1.0);
  for (std::size_t n = 0; n < len; ++n) {
    double edge = std::min(static_cast<double>(n), static_cast<double>(len - 1 - n));
    if (edge < ramp) envelope[n] = 0.5 * (1 - std::cos(std::numbers::pi * edge / ramp));
  }
  u.samples.resize(symbols.size() * len);
  for (std::size_t k = 0; k < symbols.size(); ++k) {
    const double w = 2 * std::numbers::pi * FrequencyHz(symbols[k]) / sample_rate;
    for (std::size_t n = 0; n < len; ++n) {
      double v = params_.amplitude * envelope[n] * std::sin(w * static_cast<double>(n));
      u.samples[k * len + n] = static_cast<std::int16_t>(std::lround(v * 32767.0));
    }
  }
  return u;
}

Utterance ToneCodec::Synthesize(std::string_view text, int sample_rate) const {
  return SynthesizeSymbols(TextToSymbols(text, false), sample_rate);
}

Utterance ToneCodec::SynthesizeSpoken(std::string_view text, int sample_rate) const {
  return SynthesizeSymbols(TextToSymbols(text, true), sample_rate);
}

std::vector<CodecSegment> ToneCodec::FindSegments(const Utterance& audio) const {
  ValidateUtterance(audio);
  const std::size_t n = audio.samples.size();
  const std::size_t len = SegmentSamples(audio.sample_rate);
  const std::size_t block = static_cast<std::size_t>(audio.sample_rate / 1000);
  const std::size_t ramp = static_cast<std::size_t>(audio.sample_rate * params_.ramp_ms / 1000.0);
  // The gate trips about 40% into the rising ramp.
  const std::size_t lead = static_cast<std::size_t>(0.4 * static_cast<double>(ramp));
  const std::size_t margin = static_cast<std::size_t>(len * (1 - params_.analysis_share) / 2);
  const std::size_t central = len - 2 * margin;

  std::vector<CodecSegment> out;
  std::size_t pos = 0;
  while (true) {
    std::size_t onset = n;
    for (std::size_t b = pos; b + block <= n; b += block) {
      if (Rms(audio, b, b + block) > params_.gate) {
        onset = b > pos + lead ? b - lead : pos;
        break;
      }
    }
    if (onset == n) break;
    std::size_t s = onset;
    while (s + margin + central <= n && Rms(audio, s + margin, s + margin + central) > params_.gate) {
      out.push_back({s, std::min(len, n - s)});
      s += len;
    }
    // Nothing at the onset is a click or a tail; step past it either way.
    pos = std::max(s, onset + ramp);
    if (pos >= n) break;
  }
  return out;
}

int ToneCodec::ClassifySegment(const Utterance& audio, const CodecSegment& seg) const {
  const std::size_t len = SegmentSamples(audio.sample_rate);
  const std::size_t margin = static_cast<std::size_t>(len * (1 - params_.analysis_share) / 2);
  const std::size_t begin = seg.begin + margin;
  const std::size_t end = std::min(seg.begin + seg.length, seg.begin + len - margin);
  if (end <= begin + 8) return -1;
  const std::size_t m = end - begin;

  const auto& hann = HannWindow(m);
  std::vector<double> x(m);
  double sum_w = 0, sum_w2 = 0, energy = 0;
  for (std::size_t k = 0; k < m; ++k) {
    const double w = hann[k];
    x[k] = w * Sample(audio, begin + k);
    sum_w += w;
    sum_w2 += w * w;
    energy += x[k] * x[k];
  }
  if (energy == 0) return -1;

  // Goertzel recurrences at arbitrary (non-bin) frequencies, run side by side.
  const int count = symbol_count();
  std::vector<double> coeff(count), s1(count, 0.0), s2(count, 0.0);
  for (int s = 0; s < count; ++s) {
    coeff[s] = 2 * std::cos(2 * std::numbers::pi * FrequencyHz(s) / audio.sample_rate);
  }
  for (double v : x) {
    for (int s = 0; s < count; ++s) {
      const double s0 = v + coeff[s] * s1[s] - s2[s];
      s2[s] = s1[s];
      s1[s] = s0;
    }
  }
  int best = -1;
  double best_power = -1;
  for (int s = 0; s < count; ++s) {
    double power = s1[s] * s1[s] + s2[s] * s2[s] - coeff[s] * s1[s] * s2[s];
    if (power > best_power) best_power = power, best = s;
  }
  // A pure tone puts (sum_w)^2 / (2 sum_w2) of the windowed energy in its bin.
  double purity = best_power / (energy * sum_w * sum_w / (2 * sum_w2));
  return purity >= params_.min_purity ? best : -1;
}

std::vector<int> ToneCodec::ClassifySegmentsSerial(const Utterance& audio,
                                                   const std::vector<CodecSegment>& segments) const {
  std::vector<int> out(segments.size());
  for (std::size_t i = 0; i < segments.size(); ++i) out[i] = ClassifySegment(audio, segments[i]);
  return out;
}

std::vector<int> ToneCodec::ClassifySegments(const Utterance& audio,
                                             const std::vector<CodecSegment>& segments) const {
  std::vector<int> out(segments.size());
  // Short utterances are cheaper than the cost of waking a team.
#pragma omp parallel for schedule(static) if (segments.size() >= 16)
  for (std::size_t i = 0; i < segments.size(); ++i) out[i] = ClassifySegment(audio, segments[i]);
  return out;
}

std::string ToneCodec::Decode(const Utterance& audio) const {
  auto segments = FindSegments(audio);
  return SymbolsToText(ClassifySegments(audio, segments));
}

}  // namespace ssmt
