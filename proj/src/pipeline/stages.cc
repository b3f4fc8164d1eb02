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
#include "ssmt/pipeline/stages.h"

#include <chrono>
#include <cmath>

#include "ssmt/common/io.h"
#include "ssmt/common/status.h"

namespace ssmt {

namespace {

double ElapsedMs(std::chrono::steady_clock::time_point since) {
  return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - since).count();
}

std::string Code(LangId lang) { return std::string(LangCode(lang)); }

}  // namespace

std::vector<SpeechSegment> DetectPauses(const Utterance& audio, double energy_threshold,
                                        double min_silence_ms) {
  if (!(min_silence_ms > 0)) throw InvalidArgument("min_silence_ms must be positive");
  ValidateUtterance(audio);
  const double rate = audio.sample_rate;
  const std::size_t n = audio.samples.size();
  const auto frame = static_cast<std::size_t>(std::lround(rate * kPauseFrameMs / 1000));
  const auto hop = static_cast<std::size_t>(std::lround(rate * kPauseHopMs / 1000));
  auto to_ms = [&](std::size_t sample) { return 1000.0 * static_cast<double>(sample) / rate; };

  std::vector<SpeechSegment> out;
  bool open = false;
  std::size_t seg_start = 0, last_end = 0;
  for (std::size_t b = 0; b < n; b += hop) {
    std::size_t e = std::min(n, b + frame);
    double sum = 0;
    for (std::size_t i = b; i < e; ++i) {
      double v = audio.samples[i] / 32768.0;
      sum += v * v;
    }
    bool speech = std::sqrt(sum / static_cast<double>(e - b)) >= energy_threshold;
    if (speech) {
      if (open && to_ms(b) - to_ms(last_end) >= min_silence_ms) {
        out.push_back({to_ms(seg_start), to_ms(last_end)});
        open = false;
      }
      if (!open) seg_start = b, open = true;
      last_end = e;
    }
    if (e == n) break;
  }
  if (open) out.push_back({to_ms(seg_start), to_ms(last_end)});
  return out;
}

Lexicon Lexicon::Parse(const std::string& tsv) {
  std::map<std::string, std::string> entries;
  std::size_t line_no = 0;
  for (auto line : SplitString(tsv, '\n')) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    auto f = SplitString(line, '\t');
    if (f.size() != 2 || f[0].empty()) {
      throw FormatError("lexicon line " + std::to_string(line_no) + ": expected src<TAB>tgt");
    }
    if (f[0].find(' ') != std::string::npos) {
      throw FormatError("lexicon line " + std::to_string(line_no) + ": source must be one token");
    }
    if (!entries.emplace(f[0], f[1]).second) {
      throw FormatError("lexicon line " + std::to_string(line_no) + ": duplicate entry '" + f[0] + "'");
    }
  }
  return Lexicon(std::move(entries));
}

Lexicon Lexicon::Load(const std::filesystem::path& path) {
  if (!std::filesystem::exists(path)) throw ConfigError("lexicon not found: " + path.string());
  return Parse(ReadFile(path));
}

std::string Lexicon::Lookup(const std::string& token) const {
  auto it = entries_.find(token);
  return it == entries_.end() ? token : it->second;
}

LexiconSet LexiconSet::LoadDir(const std::filesystem::path& dir) {
  if (!std::filesystem::is_directory(dir)) throw ConfigError("lexicon directory not found: " + dir.string());
  LexiconSet set;
  for (LangId a : {LangId::kEn, LangId::kHi, LangId::kMr}) {
    for (LangId b : {LangId::kEn, LangId::kHi, LangId::kMr}) {
      auto path = dir / (Code(a) + "-" + Code(b) + ".tsv");
      if (a == b || !std::filesystem::exists(path)) continue;
      // Keys and values are brought into the form the cascade produces.
      std::map<std::string, std::string> entries;
      const Lexicon raw = Lexicon::Load(path);
      for (const auto& [k, v] : raw.entries()) {
        entries[Normalize(k, a).text()] = Normalize(v, b).text();
      }
      set.Add(a, b, Lexicon(std::move(entries)));
    }
  }
  return set;
}

LexiconSet LexiconSet::Default() { return LoadDir(DataDir() / "mt"); }

void LexiconSet::Add(LangId src, LangId tgt, Lexicon lex) { lexicons_[{src, tgt}] = std::move(lex); }

bool LexiconSet::Has(LangId src, LangId tgt) const { return lexicons_.count({src, tgt}) > 0; }

const Lexicon& LexiconSet::Get(LangId src, LangId tgt) const {
  auto it = lexicons_.find({src, tgt});
  if (it == lexicons_.end()) {
    throw ConfigError("no lexicon for " + Code(src) + "-" + Code(tgt));
  }
  return it->second;
}

std::string Translate(const std::string& text, LangId src, LangId tgt, const Lexicon& lexicon) {
  if (src == tgt) throw InvalidArgument("source and target language are both " + Code(src));
  std::vector<std::string> out;
  for (const auto& tok : SplitWhitespace(text)) out.push_back(lexicon.Lookup(tok));
  return JoinTokens(out);
}

PivotResult PivotTranslate(const std::string& text, LangId src, LangId pivot, LangId tgt,
                           const LexiconSet& lexicons) {
  if (src == pivot || pivot == tgt || src == tgt) {
    throw InvalidArgument("pivot translation needs three distinct languages");
  }
  PivotResult r;
  auto hop = [&](const std::string& in, LangId a, LangId b, double* ms) {
    auto start = std::chrono::steady_clock::now();
    try {
      auto out = Translate(in, a, b, lexicons.Get(a, b));
      *ms = ElapsedMs(start);
      return out;
    } catch (const Error& e) {
      throw StageError("mt:" + Code(a) + "-" + Code(b), e.what());
    }
  };
  r.intermediate = hop(text, src, pivot, &r.first_hop_ms);
  r.translation = hop(r.intermediate, pivot, tgt, &r.second_hop_ms);
  r.total_ms = r.first_hop_ms + r.second_hop_ms;
  return r;
}

std::vector<std::vector<double>> LengthRegulate(const PhonemeDurations& pd,
                                                const std::vector<std::vector<double>>& embeddings) {
  if (pd.phonemes.size() != pd.durations.size()) {
    throw InvalidArgument("phoneme and duration lists differ in length");
  }
  if (embeddings.size() != pd.durations.size()) {
    throw InvalidArgument("need one embedding per phoneme");
  }
  std::size_t total = 0;
  for (auto d : pd.durations) {
    if (d < 0) throw InvalidArgument("negative duration " + std::to_string(d));
    total += static_cast<std::size_t>(d);
  }
  std::vector<std::vector<double>> frames;
  frames.reserve(total);
  for (std::size_t i = 0; i < embeddings.size(); ++i) {
    frames.insert(frames.end(), static_cast<std::size_t>(pd.durations[i]), embeddings[i]);
  }
  return frames;
}

PhonemeDurations CharacterPhonemes(const std::string& text, std::int64_t frames_per_phoneme) {
  PhonemeDurations pd;
  pd.phonemes = SplitCodePoints(text);
  pd.durations.assign(pd.phonemes.size(), frames_per_phoneme);
  return pd;
}

}  // namespace ssmt
