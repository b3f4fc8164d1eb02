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
#ifndef SSMT_PIPELINE_PIPELINE_H_
#define SSMT_PIPELINE_PIPELINE_H_

#include <filesystem>
#include <map>
#include <optional>
#include <string>

#include "json.hpp"
#include "ssmt/disfluency/disfluency.h"
#include "ssmt/pipeline/audio.h"
#include "ssmt/pipeline/codec.h"
#include "ssmt/pipeline/stages.h"
#include "ssmt/textprep/text.h"

namespace ssmt {

inline constexpr const char* kStageNames[] = {"asr", "dc", "mt", "tts"};

// Minimum wall time per stage. A stage finishing early sleeps out the rest,
// which gives the replica a deterministic service time for load tests.
struct StageServiceTimes {
  double asr_ms = 0;
  double dc_ms = 0;
  double mt_ms = 0;
  double tts_ms = 0;
  double total() const { return asr_ms + dc_ms + mt_ms + tts_ms; }
  static StageServiceTimes Uniform(double per_stage_ms) {
    return {per_stage_ms, per_stage_ms, per_stage_ms, per_stage_ms};
  }
};

// Everything a replica needs, independent of the language pair of a request.
struct StageConfig {
  std::filesystem::path mt_lexicon_dir;  // <src>-<tgt>.tsv files
  std::filesystem::path dc_lexicon_dir;  // <lang>/ subdirectories; mr falls back to hi
  CodecParams codec;
  StageServiceTimes service;

  static StageConfig Default();
  // Keys: mt_lexicon_dir, dc_lexicon_dir, service_ms {asr,dc,mt,tts},
  // codec {segment_ms, amplitude, ramp_ms, base_hz, step_hz, gate,
  // min_purity}. Relative paths resolve against base_dir. Unknown keys are
  // a ConfigError.
  static StageConfig FromJson(const nlohmann::json& j, const std::filesystem::path& base_dir);
};

struct PipelineConfig {
  LangId src = LangId::kEn;
  LangId tgt = LangId::kHi;
  std::optional<LangId> pivot;
  StageConfig stage = StageConfig::Default();

  // src != tgt, and a pivot differs from both; InvalidArgument otherwise.
  void Validate() const;
};

struct StageTimings {
  double asr = 0;
  double dc = 0;
  double mt = 0;
  double tts = 0;
  double total = 0;
  // Filled for pivot translation: the two MT hops.
  std::optional<double> mt_first_hop;
  std::optional<double> mt_second_hop;
};

struct StageTrace {
  std::string transcript;
  std::string fluent_text;
  std::string translation;
  std::string pivot_text;  // intermediate text when pivoting
  Utterance audio;
  StageTimings timings_ms;
  LangId src_lang = LangId::kEn;
  LangId tgt_lang = LangId::kHi;
  std::optional<LangId> pivot_lang;
};

// trace.json layout: transcript, fluent_text, translation, timings_ms
// {asr, dc, mt, tts, total}, src, tgt, pivot?, pivot_text?.
nlohmann::json TraceToJson(const StageTrace& trace);

struct TextTranslation {
  std::string translation;
  LangId src = LangId::kEn;
  bool detected = false;
  double timing_ms = 0;
};

// One pipeline replica. Stages run strictly in order ASR -> DC -> MT -> TTS.
// Loaded state is immutable, so Run* may be called concurrently, although a
// replica in a pool only ever serves one request at a time.
class Pipeline {
 public:
  explicit Pipeline(StageConfig config = StageConfig::Default());

  // Speech path. Any stage failure raises StageError naming the stage.
  StageTrace Run(const Utterance& audio, LangId src, LangId tgt,
                 std::optional<LangId> pivot = std::nullopt) const;
  StageTrace Run(const Utterance& audio, const PipelineConfig& route) const {
    return Run(audio, route.src, route.tgt, route.pivot);
  }

  // Text path (TTMT). No disfluency correction: typed input is taken as
  // fluent. Without src the language is detected from the script.
  TextTranslation TranslateText(const std::string& text, std::optional<LangId> src,
                                LangId tgt) const;

  // The individual stages, as used by Run.
  std::string Asr(const Utterance& audio) const;
  std::string CorrectText(const std::string& transcript, LangId lang) const;
  std::string Mt(const std::string& text, LangId src, LangId tgt, std::optional<LangId> pivot,
                 StageTrace* trace = nullptr) const;
  Utterance Tts(const std::string& text) const;

  const ToneCodec& codec() const { return codec_; }
  const StageConfig& config() const { return config_; }

 private:
  const DisfluencyLexicons& DcLexicons(LangId lang) const;

  StageConfig config_;
  ToneCodec codec_;
  LexiconSet lexicons_;
  std::map<LangId, DisfluencyLexicons> dc_;
};

// Builds a replica for config.stage and runs one request through it.
StageTrace RunPipeline(const PipelineConfig& config, const Utterance& audio);

}  // namespace ssmt

#endif  // SSMT_PIPELINE_PIPELINE_H_
