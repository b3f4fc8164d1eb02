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
#include "ssmt/pipeline/pipeline.h"

#include <chrono>
#include <thread>

#include "ssmt/common/io.h"
#include "ssmt/common/status.h"
#include "ssmt/textprep/langid.h"

namespace ssmt {

namespace {

using Clock = std::chrono::steady_clock;

double MsSince(Clock::time_point t) {
  return std::chrono::duration<double, std::milli>(Clock::now() - t).count();
}

// Runs fn as the named stage: pads to the minimum service time, records the
// duration, and tags any domain error with the stage name.
template <typename Fn>
auto TimedStage(const char* name, double min_ms, double* elapsed, Fn&& fn) {
  auto start = Clock::now();
  try {
    auto out = fn();
    if (min_ms > 0) {
      std::this_thread::sleep_until(start + std::chrono::duration<double, std::milli>(min_ms));
    }
    *elapsed = MsSince(start);
    return out;
  } catch (const StageError&) {
    throw;
  } catch (const Error& e) {
    throw StageError(name, e.what());
  }
}

std::filesystem::path Resolve(const std::filesystem::path& p, const std::filesystem::path& base) {
  return p.is_absolute() ? p : base / p;
}

void RejectUnknownKeys(const nlohmann::json& j, std::initializer_list<const char*> known,
                       const std::string& where) {
  for (const auto& [key, value] : j.items()) {
    bool ok = false;
    for (const char* k : known) ok = ok || key == k;
    if (!ok) throw ConfigError("unknown key '" + key + "' in " + where);
  }
}

double Number(const nlohmann::json& j, const char* key, double fallback) {
  if (!j.contains(key)) return fallback;
  if (!j[key].is_number()) throw ConfigError(std::string("'") + key + "' must be a number");
  return j[key].get<double>();
}

}  // namespace

StageConfig StageConfig::Default() {
  StageConfig c;
  c.mt_lexicon_dir = DataDir() / "mt";
  c.dc_lexicon_dir = DataDir() / "dc";
  return c;
}

StageConfig StageConfig::FromJson(const nlohmann::json& j, const std::filesystem::path& base_dir) {
  if (!j.is_object()) throw ConfigError("stage config must be an object");
  RejectUnknownKeys(j, {"mt_lexicon_dir", "dc_lexicon_dir", "service_ms", "codec"}, "stage");
  StageConfig c = Default();
  if (j.contains("mt_lexicon_dir")) c.mt_lexicon_dir = Resolve(j["mt_lexicon_dir"].get<std::string>(), base_dir);
  if (j.contains("dc_lexicon_dir")) c.dc_lexicon_dir = Resolve(j["dc_lexicon_dir"].get<std::string>(), base_dir);
  if (j.contains("service_ms")) {
    const auto& s = j["service_ms"];
    RejectUnknownKeys(s, {"asr", "dc", "mt", "tts"}, "stage.service_ms");
    c.service = {Number(s, "asr", 0), Number(s, "dc", 0), Number(s, "mt", 0), Number(s, "tts", 0)};
    if (c.service.asr_ms < 0 || c.service.dc_ms < 0 || c.service.mt_ms < 0 || c.service.tts_ms < 0) {
      throw ConfigError("stage service times must be non-negative");
    }
  }
  if (j.contains("codec")) {
    const auto& k = j["codec"];
    RejectUnknownKeys(k, {"segment_ms", "amplitude", "ramp_ms", "base_hz", "step_hz", "gate", "min_purity"},
                      "stage.codec");
    CodecParams& p = c.codec;
    p.segment_ms = Number(k, "segment_ms", p.segment_ms);
    p.amplitude = Number(k, "amplitude", p.amplitude);
    p.ramp_ms = Number(k, "ramp_ms", p.ramp_ms);
    p.base_hz = Number(k, "base_hz", p.base_hz);
    p.step_hz = Number(k, "step_hz", p.step_hz);
    p.gate = Number(k, "gate", p.gate);
    p.min_purity = Number(k, "min_purity", p.min_purity);
  }
  return c;
}

void PipelineConfig::Validate() const {
  if (src == tgt) {
    throw InvalidArgument("source and target language are both " + std::string(LangCode(src)));
  }
  if (pivot && (*pivot == src || *pivot == tgt)) {
    throw InvalidArgument("pivot language must differ from source and target");
  }
}

nlohmann::json TraceToJson(const StageTrace& t) {
  nlohmann::json timings = {{"asr", t.timings_ms.asr},
                            {"dc", t.timings_ms.dc},
                            {"mt", t.timings_ms.mt},
                            {"tts", t.timings_ms.tts},
                            {"total", t.timings_ms.total}};
  if (t.timings_ms.mt_first_hop) {
    timings["mt_hops"] = {*t.timings_ms.mt_first_hop, *t.timings_ms.mt_second_hop};
  }
  nlohmann::json j = {{"transcript", t.transcript},
                      {"fluent_text", t.fluent_text},
                      {"translation", t.translation},
                      {"timings_ms", timings},
                      {"src", LangCode(t.src_lang)},
                      {"tgt", LangCode(t.tgt_lang)}};
  if (t.pivot_lang) {
    j["pivot"] = LangCode(*t.pivot_lang);
    j["pivot_text"] = t.pivot_text;
  }
  return j;
}

Pipeline::Pipeline(StageConfig config)
    : config_(std::move(config)), codec_(config_.codec), lexicons_(LexiconSet::LoadDir(config_.mt_lexicon_dir)) {
  for (LangId lang : {LangId::kEn, LangId::kHi, LangId::kMr}) {
    auto dir = config_.dc_lexicon_dir / LangCode(lang);
    if (!std::filesystem::is_directory(dir) && lang == LangId::kMr) {
      dir = config_.dc_lexicon_dir / "hi";
    }
    if (!std::filesystem::is_directory(dir)) {
      throw ConfigError("disfluency lexicons not found: " + dir.string());
    }
    dc_.emplace(lang, DisfluencyLexicons::Load(dir, lang));
  }
}

const DisfluencyLexicons& Pipeline::DcLexicons(LangId lang) const { return dc_.at(lang); }

std::string Pipeline::Asr(const Utterance& audio) const {
  ValidateUtterance(audio);
  if (audio.samples.empty()) throw InvalidArgument("empty audio");
  auto transcript = codec_.Decode(audio);
  if (transcript.empty()) throw InvalidArgument("no speech detected");
  return transcript;
}

std::string Pipeline::CorrectText(const std::string& transcript, LangId lang) const {
  auto tokens = Tokenize(Normalize(transcript, lang));
  return JoinTokens(CorrectDisfluencies(tokens, DcLexicons(lang)).fluent);
}

std::string Pipeline::Mt(const std::string& text, LangId src, LangId tgt,
                         std::optional<LangId> pivot, StageTrace* trace) const {
  if (pivot) {
    auto r = PivotTranslate(text, src, *pivot, tgt, lexicons_);
    if (trace) {
      trace->pivot_text = r.intermediate;
      trace->timings_ms.mt_first_hop = r.first_hop_ms;
      trace->timings_ms.mt_second_hop = r.second_hop_ms;
    }
    return r.translation;
  }
  return Translate(text, src, tgt, lexicons_.Get(src, tgt));
}

Utterance Pipeline::Tts(const std::string& text) const {
  return codec_.SynthesizeSpoken(text, kTtsSampleRate);
}

StageTrace Pipeline::Run(const Utterance& audio, LangId src, LangId tgt,
                         std::optional<LangId> pivot) const {
  PipelineConfig route{src, tgt, pivot, config_};
  route.Validate();
  StageTrace t;
  t.src_lang = src;
  t.tgt_lang = tgt;
  t.pivot_lang = pivot;
  const auto& svc = config_.service;
  auto start = Clock::now();
  t.transcript = TimedStage("asr", svc.asr_ms, &t.timings_ms.asr, [&] { return Asr(audio); });
  t.fluent_text = TimedStage("dc", svc.dc_ms, &t.timings_ms.dc, [&] { return CorrectText(t.transcript, src); });
  t.translation = TimedStage("mt", svc.mt_ms, &t.timings_ms.mt, [&] { return Mt(t.fluent_text, src, tgt, pivot, &t); });
  t.audio = TimedStage("tts", svc.tts_ms, &t.timings_ms.tts, [&] { return Tts(t.translation); });
  t.timings_ms.total = MsSince(start);
  return t;
}

TextTranslation Pipeline::TranslateText(const std::string& text, std::optional<LangId> src,
                                        LangId tgt) const {
  auto start = Clock::now();
  TextTranslation r;
  r.detected = !src.has_value();
  r.src = src ? *src : DetectLanguage(text);
  if (r.src == tgt) {
    throw InvalidArgument("source and target language are both " + std::string(LangCode(tgt)));
  }
  auto tokens = Tokenize(Normalize(text, r.src));
  r.translation = Translate(JoinTokens(tokens), r.src, tgt, lexicons_.Get(r.src, tgt));
  r.timing_ms = MsSince(start);
  return r;
}

StageTrace RunPipeline(const PipelineConfig& config, const Utterance& audio) {
  config.Validate();
  return Pipeline(config.stage).Run(audio, config);
}

}  // namespace ssmt
