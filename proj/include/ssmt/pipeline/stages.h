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
#ifndef SSMT_PIPELINE_STAGES_H_
#define SSMT_PIPELINE_STAGES_H_

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "ssmt/pipeline/audio.h"
#include "ssmt/textprep/text.h"

namespace ssmt {

// ---------------------------------------------------------------------------
// Pause detection.

struct SpeechSegment {
  double start_ms = 0;
  double end_ms = 0;
  friend bool operator==(const SpeechSegment&, const SpeechSegment&) = default;
};

inline constexpr double kPauseFrameMs = 20;
inline constexpr double kPauseHopMs = 10;

// Frames of 20 ms every 10 ms; a frame is speech when its RMS (fraction of
// full scale) reaches energy_threshold. Speech frames separated by at least
// min_silence_ms of silence belong to different segments.
std::vector<SpeechSegment> DetectPauses(const Utterance& audio, double energy_threshold,
                                        double min_silence_ms);

// ---------------------------------------------------------------------------
// Lexicon translation.

// Token-to-phrase substitution table read from `src<TAB>tgt` lines. '#'
// lines are comments. An empty lexicon translates as the identity.
class Lexicon {
 public:
  Lexicon() = default;
  explicit Lexicon(std::map<std::string, std::string> entries) : entries_(std::move(entries)) {}

  static Lexicon Parse(const std::string& tsv);
  // Missing file: ConfigError.
  static Lexicon Load(const std::filesystem::path& path);

  const std::map<std::string, std::string>& entries() const { return entries_; }
  std::size_t size() const { return entries_.size(); }

  std::string Lookup(const std::string& token) const;

 private:
  std::map<std::string, std::string> entries_;
};

// Directory of `<src>-<tgt>.tsv` lexicons.
class LexiconSet {
 public:
  LexiconSet() = default;
  static LexiconSet LoadDir(const std::filesystem::path& dir);
  static LexiconSet Default();  // $data/mt

  void Add(LangId src, LangId tgt, Lexicon lex);
  bool Has(LangId src, LangId tgt) const;
  // ConfigError when the pair has no lexicon.
  const Lexicon& Get(LangId src, LangId tgt) const;

 private:
  std::map<std::pair<LangId, LangId>, Lexicon> lexicons_;
};

// Space-separated tokens are substituted one by one; unknown tokens pass
// through. src == tgt is InvalidArgument.
std::string Translate(const std::string& text, LangId src, LangId tgt, const Lexicon& lexicon);

struct PivotResult {
  std::string translation;
  std::string intermediate;
  double first_hop_ms = 0;
  double second_hop_ms = 0;
  double total_ms = 0;
};

// translate(translate(text, src, pivot), pivot, tgt) with per-hop timings.
// A failing hop raises StageError("mt:<src>-<pivot>" or "mt:<pivot>-<tgt>").
PivotResult PivotTranslate(const std::string& text, LangId src, LangId pivot, LangId tgt,
                           const LexiconSet& lexicons);

// ---------------------------------------------------------------------------
// Length regulator.

struct PhonemeDurations {
  std::vector<std::string> phonemes;
  std::vector<std::int64_t> durations;  // frames
};

// Each embedding repeated durations[i] times, in order. Mismatched lengths
// or a negative duration raise InvalidArgument.
std::vector<std::vector<double>> LengthRegulate(const PhonemeDurations& pd,
                                                const std::vector<std::vector<double>>& embeddings);

// Characters stand in for phonemes: one pseudo-phoneme per code point.
PhonemeDurations CharacterPhonemes(const std::string& text, std::int64_t frames_per_phoneme);

}  // namespace ssmt

#endif  // SSMT_PIPELINE_STAGES_H_
