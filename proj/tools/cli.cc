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
#include "cli.h"

#include <pthread.h>
#include <signal.h>

#include <algorithm>
#include <cstdio>
#include <memory>
#include <optional>
#include <sstream>
#include <thread>

#include "CLI11.hpp"
#include "json.hpp"
#include "ssmt/common/io.h"
#include "ssmt/common/status.h"
#include "ssmt/corpusfilter/corpusfilter.h"
#include "ssmt/disfluency/disfluency.h"
#include "ssmt/loadtest/loadtest.h"
#include "ssmt/metrics/metrics.h"
#include "ssmt/pipeline/audio.h"
#include "ssmt/pipeline/pipeline.h"
#include "ssmt/serving/http.h"
#include "ssmt/textprep/bpe.h"

namespace ssmt {
namespace {

using nlohmann::json;

const std::vector<std::string> kLangs = {"en", "hi", "mr"};

std::string Fixed(double v, int places) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.*f", places, v);
  return buf;
}

json Range(const TokenRange& r) { return json::array({r.begin, r.end}); }

json ScoredPairJson(const ScoredPair& p) {
  return {{"src", p.src}, {"tgt", p.tgt}, {"score", p.score}, {"degenerate", p.degenerate}};
}

json ScoredPairsJson(const std::vector<ScoredPair>& pairs) {
  json a = json::array();
  for (const auto& p : pairs) a.push_back(ScoredPairJson(p));
  return a;
}

json Prf1Json(const Prf1& m) {
  return {{"precision", m.precision}, {"recall", m.recall}, {"f1", m.f1}, {"tp", m.tp},
          {"fp", m.fp},               {"fn", m.fn},         {"no_positives", m.no_positives}};
}

// Every flag the parser knows, in one place so handlers stay small.
struct Flags {
  bool json = false;
  bool quiet = false;
  std::string config;
  std::uint64_t seed = 0;

  // serve
  std::string host;
  int port = -1;

  // run
  std::string in, out, trace, src, tgt, pivot;

  // filter
  std::string src_file, tgt_file, scores_file, embedder_url, dropped_file, mode = "one2one";
  double tau = 0;
  std::size_t max_cells = kDefaultAlignCellCap;

  // dc
  std::string lang = "en", inject_config, pred, gold;

  // bpe
  std::string model;
  int merges = kDefaultBpeMerges;

  // metrics
  std::string ref, hyp, smooth = "none", tokenize = "13a", aq, i;

  // loadtest
  std::string target, deployed, baseline, path = "/api/v1/ssmt", levels = "50,100,500,1000";
  int users = 1;
  double duration = 10, think = 0, jitter = 0, warmup = 0.1, stage_ms = 10;
};

class Cli {
 public:
  Cli(std::ostream& out, std::ostream& err) : out_(out), err_(err) { Build(); }

  CLI::App& app() { return app_; }
  int Run(const std::vector<std::string>& args);

 private:
  void Build();
  void Dispatch();
  void Note(const std::string& msg) {
    if (!f_.quiet) err_ << msg << "\n";
  }
  void Emit(const json& j) { out_ << j.dump(2) << "\n"; }
  ServerConfig Config() const {
    return f_.config.empty() ? ServerConfig{} : ServerConfig::Load(f_.config);
  }
  std::shared_ptr<Embedder> MakeEmbedder() const;
  std::vector<ScoredPair> LoadOrScore();
  std::unique_ptr<LoadTarget> MakeTarget(const std::string& spec);

  void Serve();
  void RunPipelineCmd();
  void FilterScore();
  void FilterExtract();
  void FilterAlign();
  void DcCorrect();
  void DcInject();
  void DcEval();
  void BpeLearn();
  void BpeApply();
  void MetricsWer();
  void MetricsBleu();
  void MetricsMos();
  void MetricsKpi();
  void LoadRun();
  void LoadSweep();

  std::ostream& out_;
  std::ostream& err_;
  CLI::App app_{"Speech-to-speech machine translation desk toolkit", "ssmt"};
  Flags f_;
  // In-process pools created for `pool:GxR` load targets.
  std::vector<std::unique_ptr<ReplicaPool>> pools_;
  std::vector<std::pair<CLI::App*, void (Cli::*)()>> handlers_;
};

void Cli::Build() {
  app_.failure_message(CLI::FailureMessage::help);
  app_.require_subcommand(1);
  app_.fallthrough();
  app_.add_flag("--json", f_.json, "Machine-readable JSON on stdout");
  app_.add_option("--config", f_.config, "Server config JSON (pool, stage, host, port)")
      ->check(CLI::ExistingFile);
  app_.add_option("--seed", f_.seed, "Seed for randomized commands");
  app_.add_flag("--quiet", f_.quiet, "Suppress progress notes on stderr");

  auto* serve = app_.add_subcommand("serve", "Serve the HTTP API");
  serve->add_option("--host", f_.host, "Bind address (overrides config)");
  serve->add_option("--port", f_.port, "Bind port, 0 for any (overrides config)")
      ->check(CLI::Range(0, 65535));
  handlers_.push_back({serve, &Cli::Serve});

  auto* run = app_.add_subcommand("run", "Run the speech cascade on one WAV file");
  run->add_option("--in", f_.in, "Input WAV (PCM16 mono, 16 kHz)")->required()->check(CLI::ExistingFile);
  run->add_option("--src", f_.src, "Source language")->required()->check(CLI::IsMember(kLangs));
  run->add_option("--tgt", f_.tgt, "Target language")->required()->check(CLI::IsMember(kLangs));
  run->add_option("--pivot", f_.pivot, "Pivot language")->check(CLI::IsMember(kLangs));
  run->add_option("--out", f_.out, "Output WAV (22.05 kHz)");
  run->add_option("--trace", f_.trace, "Write the stage trace JSON here");
  handlers_.push_back({run, &Cli::RunPipelineCmd});

  auto* filter = app_.add_subcommand("filter", "Score, filter and realign parallel corpora");
  filter->require_subcommand(1);
  auto corpus = [&](CLI::App* c, bool required) {
    auto* s = c->add_option("--src", f_.src_file, "Source side, one sentence per line")->check(CLI::ExistingFile);
    auto* t = c->add_option("--tgt", f_.tgt_file, "Target side, line-aligned with --src")->check(CLI::ExistingFile);
    if (required) {
      s->required();
      t->required();
    }
    c->add_option("--embedder", f_.embedder_url, "Remote embedding service URL (default: trigram)");
    return std::pair{s, t};
  };
  auto* fscore = filter->add_subcommand("score", "Score line-aligned pairs");
  corpus(fscore, true);
  fscore->add_option("--out", f_.out, "Write the score TSV here instead of stdout");
  handlers_.push_back({fscore, &Cli::FilterScore});

  auto* fextract = filter->add_subcommand("extract", "Keep pairs scoring at least tau");
  auto [esrc, etgt] = corpus(fextract, false);
  auto* escores = fextract->add_option("--scores", f_.scores_file, "Score TSV from `filter score`")
                      ->check(CLI::ExistingFile);
  esrc->excludes(escores);
  etgt->excludes(escores);
  esrc->needs(etgt);
  etgt->needs(esrc);
  fextract->add_option("--tau", f_.tau, "Threshold in [-1, 1]")->required()->check(CLI::Range(-1.0, 1.0));
  fextract->add_option("--out", f_.out, "Write kept pairs here instead of stdout");
  fextract->add_option("--dropped", f_.dropped_file, "Write dropped pairs here");
  handlers_.push_back({fextract, &Cli::FilterExtract});

  auto* falign = filter->add_subcommand("align", "Realign two unaligned sides");
  corpus(falign, true);
  falign->add_option("--mode", f_.mode, "Matching mode")
      ->check(CLI::IsMember({"argmax", "one2one"}))
      ->capture_default_str();
  falign->add_option("--max-cells", f_.max_cells, "Largest score matrix to build")->capture_default_str();
  falign->add_option("--out", f_.out, "Write aligned pairs here instead of stdout");
  handlers_.push_back({falign, &Cli::FilterAlign});

  auto* dc = app_.add_subcommand("dc", "Disfluency correction");
  dc->require_subcommand(1);
  auto* dcorrect = dc->add_subcommand("correct", "Remove disfluencies, one sentence per line");
  dcorrect->add_option("--lang", f_.lang, "Language")->check(CLI::IsMember(kLangs))->capture_default_str();
  dcorrect->add_option("--in", f_.in, "Input text")->required()->check(CLI::ExistingFile);
  handlers_.push_back({dcorrect, &Cli::DcCorrect});

  auto* dinject = dc->add_subcommand("inject", "Inject labeled disfluencies into fluent sentences");
  dinject->add_option("--lang", f_.lang, "Language")->check(CLI::IsMember(kLangs))->capture_default_str();
  dinject->add_option("--in", f_.in, "Fluent sentences, one per line")->required()->check(CLI::ExistingFile);
  dinject->add_option("--config", f_.inject_config, "Injection probabilities JSON")
      ->required()
      ->check(CLI::ExistingFile);
  dinject->add_option("--seed", f_.seed, "Seed; sentence k uses seed + k");
  handlers_.push_back({dinject, &Cli::DcInject});

  auto* deval = dc->add_subcommand("eval", "Token-level P/R/F1 of disfluent labels");
  deval->add_option("--pred", f_.pred, "Predicted label TSV")->required()->check(CLI::ExistingFile);
  deval->add_option("--gold", f_.gold, "Gold label TSV")->required()->check(CLI::ExistingFile);
  handlers_.push_back({deval, &Cli::DcEval});

  auto* bpe = app_.add_subcommand("bpe", "Byte-pair encoding");
  bpe->require_subcommand(1);
  auto* blearn = bpe->add_subcommand("learn", "Learn merges from a corpus");
  blearn->add_option("--in", f_.in, "Corpus")->required()->check(CLI::ExistingFile);
  blearn->add_option("--merges", f_.merges, "Number of merges")->check(CLI::NonNegativeNumber)->capture_default_str();
  blearn->add_option("--out", f_.out, "Model file")->required();
  handlers_.push_back({blearn, &Cli::BpeLearn});

  auto* bapply = bpe->add_subcommand("apply", "Segment text with a learned model");
  bapply->add_option("--model", f_.model, "Model file")->required()->check(CLI::ExistingFile);
  bapply->add_option("--in", f_.in, "Text")->required()->check(CLI::ExistingFile);
  handlers_.push_back({bapply, &Cli::BpeApply});

  auto* metrics = app_.add_subcommand("metrics", "Evaluation metrics");
  metrics->require_subcommand(1);
  auto* mwer = metrics->add_subcommand("wer", "Corpus word error rate");
  mwer->add_option("--ref", f_.ref, "References, one per line")->required()->check(CLI::ExistingFile);
  mwer->add_option("--hyp", f_.hyp, "Hypotheses, one per line")->required()->check(CLI::ExistingFile);
  handlers_.push_back({mwer, &Cli::MetricsWer});

  auto* mbleu = metrics->add_subcommand("bleu", "Corpus BLEU");
  mbleu->add_option("--ref", f_.ref, "References, one per line")->required()->check(CLI::ExistingFile);
  mbleu->add_option("--hyp", f_.hyp, "Hypotheses, one per line")->required()->check(CLI::ExistingFile);
  mbleu->add_option("--smooth", f_.smooth, "Smoothing")->check(CLI::IsMember({"none", "exp"}))->capture_default_str();
  mbleu->add_option("--tokenize", f_.tokenize, "Tokenizer")
      ->check(CLI::IsMember({"13a", "none"}))
      ->capture_default_str();
  handlers_.push_back({mbleu, &Cli::MetricsBleu});

  auto* mmos = metrics->add_subcommand("mos", "Mean opinion score from AQ and I");
  mmos->add_option("--aq", f_.aq, "Audio quality rating in [0, 5]")->required();
  mmos->add_option("--i", f_.i, "Interpretability rating in [0, 5]")->required();
  handlers_.push_back({mmos, &Cli::MetricsMos});

  auto* mkpi = metrics->add_subcommand("kpi", "Per-pair KPI means from a ratings CSV");
  mkpi->add_option("--in", f_.in, "CSV with header rater,pair,tq,sq,i")->required()->check(CLI::ExistingFile);
  handlers_.push_back({mkpi, &Cli::MetricsKpi});

  auto* load = app_.add_subcommand("loadtest", "Closed-loop load generation");
  load->require_subcommand(1);
  auto profile = [&](CLI::App* c) {
    c->add_option("--duration", f_.duration, "Seconds per run")->check(CLI::PositiveNumber)->capture_default_str();
    c->add_option("--think", f_.think, "Think time in ms")->check(CLI::NonNegativeNumber)->capture_default_str();
    c->add_option("--jitter", f_.jitter, "Uniform think-time jitter in ms")
        ->check(CLI::NonNegativeNumber)
        ->capture_default_str();
    c->add_option("--warmup", f_.warmup, "Unmeasured leading fraction of each run")
        ->check(CLI::Range(0.0, 0.99))
        ->capture_default_str();
    c->add_option("--path", f_.path, "Endpoint for URL targets")->capture_default_str();
    c->add_option("--stage-ms", f_.stage_ms, "Per-stage service time for pool:GxR targets")
        ->check(CLI::NonNegativeNumber)
        ->capture_default_str();
  };
  auto* lrun = load->add_subcommand("run", "One load level against one target");
  lrun->add_option("--target", f_.target, "Service URL or pool:GxR")->required();
  lrun->add_option("--users", f_.users, "Concurrent users")->check(CLI::PositiveNumber)->capture_default_str();
  profile(lrun);
  handlers_.push_back({lrun, &Cli::LoadRun});

  auto* lsweep = load->add_subcommand("sweep", "Median latency per user level, deployed vs baseline");
  lsweep->add_option("--levels", f_.levels, "Ascending comma-separated user levels")->capture_default_str();
  lsweep->add_option("--deployed", f_.deployed, "Service URL or pool:GxR")->required();
  lsweep->add_option("--baseline", f_.baseline, "Service URL or pool:GxR");
  lsweep->add_option("--out", f_.out, "Write the report here (.json or .md)");
  profile(lsweep);
  handlers_.push_back({lsweep, &Cli::LoadSweep});
}

int Cli::Run(const std::vector<std::string>& args) {
  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app_.parse(reversed);
  } catch (const CLI::CallForHelp& e) {
    return app_.exit(e, out_, err_);
  } catch (const CLI::CallForAllHelp& e) {
    return app_.exit(e, out_, err_);
  } catch (const CLI::ParseError& e) {
    app_.exit(e, out_, err_);
    return kExitUsageError;
  }
  try {
    Dispatch();
  } catch (const Error& e) {
    err_ << "error: " << e.what() << "\n";
    return kExitDomainError;
  } catch (const json::exception& e) {
    err_ << "error: " << e.what() << "\n";
    return kExitDomainError;
  }
  return kExitOk;
}

void Cli::Dispatch() {
  for (auto& [sub, handler] : handlers_) {
    if (sub->parsed()) {
      (this->*handler)();
      return;
    }
  }
}

std::shared_ptr<Embedder> Cli::MakeEmbedder() const {
  std::string url = f_.embedder_url;
  if (url.empty() && !f_.config.empty()) url = Config().embedder_url;
  if (url.empty()) return std::make_shared<TrigramEmbedder>();
  return std::make_shared<RemoteEmbedder>(url);
}

void Cli::Serve() {
  // SIGINT/SIGTERM are taken synchronously on a watcher thread. The mask is
  // set before any worker thread exists so that every thread inherits it.
  sigset_t signals;
  sigemptyset(&signals);
  sigaddset(&signals, SIGINT);
  sigaddset(&signals, SIGTERM);
  pthread_sigmask(SIG_BLOCK, &signals, nullptr);
  ServerConfig cfg = Config();
  if (!f_.host.empty()) cfg.host = f_.host;
  if (f_.port >= 0) cfg.port = f_.port;
  std::shared_ptr<Embedder> embedder;
  if (cfg.embedder_url.empty()) {
    embedder = std::make_shared<TrigramEmbedder>();
  } else {
    embedder = std::make_shared<RemoteEmbedder>(cfg.embedder_url);
  }
  ReplicaPool pool(cfg.pool, cfg.stage);
  HttpService http(pool, embedder);

  http.Bind(cfg.host, cfg.port);
  std::size_t replicas = static_cast<std::size_t>(cfg.pool.devices * cfg.pool.replicas_per_device);
  if (f_.json) {
    out_ << json{{"url", http.url()}, {"replicas", replicas}}.dump() << std::endl;
  } else {
    out_ << "listening on " << http.url() << " with " << replicas << " replicas" << std::endl;
  }
  std::thread watcher([&] {
    int sig = 0;
    sigwait(&signals, &sig);
    http.Stop();
  });
  http.Run();
  pool.Shutdown();
  // Run() can also return on its own; release the watcher in that case.
  pthread_kill(watcher.native_handle(), SIGTERM);
  watcher.join();
  pthread_sigmask(SIG_UNBLOCK, &signals, nullptr);
  Note("stopped");
}

void Cli::RunPipelineCmd() {
  PipelineConfig pc;
  pc.src = ParseLang(f_.src);
  pc.tgt = ParseLang(f_.tgt);
  if (!f_.pivot.empty()) pc.pivot = ParseLang(f_.pivot);
  if (!f_.config.empty()) pc.stage = Config().stage;
  pc.Validate();
  Utterance audio = ReadWav(f_.in);
  StageTrace trace = RunPipeline(pc, audio);
  if (!f_.out.empty()) WriteWav(f_.out, trace.audio);
  json tj = TraceToJson(trace);
  if (!f_.trace.empty()) WriteFile(f_.trace, tj.dump(2) + "\n");
  if (f_.json) {
    Emit(tj);
  } else {
    out_ << trace.translation << "\n";
    Note("transcript: " + trace.transcript);
    Note("fluent: " + trace.fluent_text);
    Note("total " + Fixed(trace.timings_ms.total, 1) + " ms");
  }
}

std::vector<ScoredPair> Cli::LoadOrScore() {
  if (!f_.scores_file.empty()) return ParseScoreTsv(ReadFile(f_.scores_file));
  if (f_.src_file.empty()) throw InvalidArgument("give --src and --tgt, or --scores");
  auto embedder = MakeEmbedder();
  return ScorePairs(ReadLines(f_.src_file), ReadLines(f_.tgt_file), *embedder);
}

void Cli::FilterScore() {
  auto pairs = LoadOrScore();
  if (f_.json) {
    Emit({{"pairs", ScoredPairsJson(pairs)}});
  } else if (f_.out.empty()) {
    out_ << FormatScoreTsv(pairs);
  }
  if (!f_.out.empty()) WriteFile(f_.out, FormatScoreTsv(pairs));
  Note("scored " + std::to_string(pairs.size()) + " pairs");
}

void Cli::FilterExtract() {
  auto pairs = LoadOrScore();
  FilterResult r = FilterByThreshold(pairs, f_.tau);
  if (!f_.out.empty()) WriteFile(f_.out, FormatScoreTsv(r.kept));
  if (!f_.dropped_file.empty()) WriteFile(f_.dropped_file, FormatScoreTsv(r.dropped));
  if (f_.json) {
    Emit({{"tau", f_.tau},
          {"total", pairs.size()},
          {"kept", ScoredPairsJson(r.kept)},
          {"kept_indices", r.kept_indices},
          {"dropped_indices", r.dropped_indices}});
  } else if (f_.out.empty()) {
    out_ << FormatScoreTsv(r.kept);
  }
  Note("kept " + std::to_string(r.kept.size()) + " of " + std::to_string(pairs.size()) + " pairs");
}

void Cli::FilterAlign() {
  auto src = ReadLines(f_.src_file);
  auto tgt = ReadLines(f_.tgt_file);
  auto embedder = MakeEmbedder();
  auto r = Realign(src, tgt, *embedder, ParseAlignMode(f_.mode), f_.max_cells);
  std::vector<ScoredPair> pairs;
  for (const auto& m : r.matches) pairs.push_back({src[m.src_index], tgt[m.tgt_index], m.score, false});
  if (!f_.out.empty()) WriteFile(f_.out, FormatScoreTsv(pairs));
  if (f_.json) {
    json matches = json::array();
    for (const auto& m : r.matches) {
      matches.push_back({{"src_index", m.src_index}, {"tgt_index", m.tgt_index}, {"score", m.score}});
    }
    Emit({{"mode", AlignModeName(r.mode)}, {"matches", matches}});
  } else if (f_.out.empty()) {
    out_ << FormatScoreTsv(pairs);
  }
  Note("aligned " + std::to_string(r.matches.size()) + " pairs (" + AlignModeName(r.mode) + ")");
}

void Cli::DcCorrect() {
  const LangId lang = ParseLang(f_.lang);
  const auto& lex = DisfluencyLexicons::Default(lang);
  json sentences = json::array();
  for (const auto& line : ReadLines(f_.in)) {
    auto tokens = Tokenize(Normalize(line, lang));
    auto r = CorrectDisfluencies(tokens, lex);
    if (!f_.json) {
      out_ << JoinTokens(r.fluent) << "\n";
      continue;
    }
    json labels = json::array(), spans = json::array();
    for (Label l : r.labeled.labels) labels.push_back(static_cast<int>(l));
    for (const auto& s : r.spans) {
      spans.push_back({{"type", DisfluencyTypeName(s.type)},
                       {"reparandum", Range(s.reparandum)},
                       {"interregnum", Range(s.interregnum)},
                       {"repair", Range(s.repair)}});
    }
    sentences.push_back({{"input", line},
                         {"fluent", JoinTokens(r.fluent)},
                         {"tokens", r.labeled.tokens},
                         {"labels", labels},
                         {"spans", spans}});
  }
  if (f_.json) Emit({{"lang", f_.lang}, {"sentences", sentences}});
}

void Cli::DcInject() {
  const LangId lang = ParseLang(f_.lang);
  const auto& lex = DisfluencyLexicons::Default(lang);
  auto config = InjectionConfig::FromJson(ReadFile(f_.inject_config));
  std::vector<LabeledSentence> out;
  std::uint64_t k = 0;
  for (const auto& line : ReadLines(f_.in)) {
    auto tokens = Tokenize(Normalize(line, lang));
    out.push_back(InjectDisfluencies(tokens, config, lex, f_.seed + k++));
  }
  if (f_.json) {
    json sentences = json::array();
    for (const auto& s : out) {
      json labels = json::array();
      for (Label l : s.labels) labels.push_back(static_cast<int>(l));
      sentences.push_back({{"tokens", s.tokens}, {"labels", labels}});
    }
    Emit({{"lang", f_.lang}, {"seed", f_.seed}, {"sentences", sentences}});
  } else {
    out_ << FormatLabelTsv(out);
  }
}

void Cli::DcEval() {
  auto m = EvaluateLabels(ParseLabelTsv(ReadFile(f_.pred)), ParseLabelTsv(ReadFile(f_.gold)));
  if (f_.json) {
    Emit(Prf1Json(m));
    return;
  }
  out_ << "precision " << Fixed(m.precision, 4) << "\nrecall " << Fixed(m.recall, 4) << "\nf1 "
       << Fixed(m.f1, 4) << "\n";
  if (m.no_positives) Note("no disfluent tokens in either file");
}

void Cli::BpeLearn() {
  auto model = LearnBpe(CountWords(ReadLines(f_.in)), f_.merges);
  model.Save(f_.out);
  if (f_.json) {
    Emit({{"merges", model.merges().size()}, {"requested", f_.merges}, {"out", f_.out}});
  } else {
    out_ << "learned " << model.merges().size() << " merges -> " << f_.out << "\n";
  }
  if (static_cast<int>(model.merges().size()) < f_.merges) {
    Note("corpus ran out of pairs before " + std::to_string(f_.merges) + " merges");
  }
}

void Cli::BpeApply() {
  auto model = BpeModel::Load(f_.model);
  json lines = json::array();
  for (const auto& line : ReadLines(f_.in)) {
    std::vector<std::string> pieces;
    for (const auto& token : SplitWhitespace(line)) {
      for (auto& sw : ApplyBpe(model, token)) pieces.push_back(std::move(sw));
    }
    if (f_.json) {
      lines.push_back(pieces);
    } else {
      out_ << JoinTokens(pieces) << "\n";
    }
  }
  if (f_.json) Emit({{"eow", model.eow_marker()}, {"lines", lines}});
}

void Cli::MetricsWer() {
  std::vector<std::vector<Token>> refs, hyps;
  for (const auto& l : ReadLines(f_.ref)) refs.push_back(SplitWhitespace(l));
  for (const auto& l : ReadLines(f_.hyp)) hyps.push_back(SplitWhitespace(l));
  auto w = ComputeCorpusWer(refs, hyps);
  if (f_.json) {
    Emit({{"wer", w.wer},
          {"substitutions", w.substitutions},
          {"deletions", w.deletions},
          {"insertions", w.insertions},
          {"correct", w.correct},
          {"ref_words", w.ref_words}});
    return;
  }
  out_ << "WER " << Fixed(100 * w.wer, 2) << "% (S=" << w.substitutions << " D=" << w.deletions
       << " I=" << w.insertions << " N=" << w.ref_words << ")\n";
}

void Cli::MetricsBleu() {
  BleuOptions opts;
  opts.smoothing = f_.smooth == "exp" ? BleuSmoothing::kExp : BleuSmoothing::kNone;
  opts.tokenizer = f_.tokenize == "none" ? BleuTokenizer::kNone : BleuTokenizer::k13a;
  auto b = ComputeBleu(ReadLines(f_.hyp), ReadLines(f_.ref), opts);
  if (f_.json) {
    Emit({{"bleu", b.score},
          {"precisions", b.precisions},
          {"brevity_penalty", b.brevity_penalty},
          {"hyp_len", b.stats.hyp_len},
          {"ref_len", b.stats.ref_len}});
    return;
  }
  out_ << "BLEU = " << Fixed(b.score, 2) << " ";
  for (std::size_t n = 0; n < b.precisions.size(); ++n) {
    out_ << (n ? "/" : "") << Fixed(100 * b.precisions[n], 1);
  }
  out_ << " (BP = " << Fixed(b.brevity_penalty, 3) << " hyp_len = " << b.stats.hyp_len
       << " ref_len = " << b.stats.ref_len << ")\n";
}

void Cli::MetricsMos() {
  auto m = ComputeMos(Rational::Parse(f_.aq), Rational::Parse(f_.i));
  if (f_.json) {
    Emit({{"audio_quality", m.audio_quality.ToDouble()},
          {"interpretability", m.interpretability.ToDouble()},
          {"mos", m.mos.ToDouble()},
          {"mos_2dp", m.mos.ToFixed(2)}});
    return;
  }
  out_ << m.mos.ToFixed(2) << "\n";
}

void Cli::MetricsKpi() {
  auto ratings = ParseRatingsCsv(ReadFile(f_.in));
  auto by_pair = AggregateKpiByPair(ratings);
  if (!f_.json) {
    out_ << FormatKpiReport(by_pair);
    return;
  }
  json pairs = json::object();
  for (const auto& [pair, s] : by_pair) {
    pairs[pair] = {{"tq", s.tq.ToDouble()},
                   {"sq", s.sq.ToDouble()},
                   {"i", s.i.ToDouble()},
                   {"n_raters", s.n_raters}};
  }
  Emit({{"pairs", pairs}});
}

std::unique_ptr<LoadTarget> Cli::MakeTarget(const std::string& spec) {
  if (spec.rfind("pool:", 0) == 0) {
    int g = 0, r = 0;
    char x = 0;
    std::istringstream in(spec.substr(5));
    if (!(in >> g >> x >> r) || x != 'x' || g < 1 || r < 1 || !in.eof()) {
      throw InvalidArgument("pool target must look like pool:GxR, got '" + spec + "'");
    }
    StageConfig stage = f_.config.empty() ? StageConfig::Default() : Config().stage;
    stage.service = StageServiceTimes::Uniform(f_.stage_ms);
    PoolOptions opts;
    opts.devices = g;
    opts.replicas_per_device = r;
    // Closed-loop users never exceed the largest level; size the queue for it.
    int most = f_.users;
    for (const auto& level : SplitString(f_.levels, ',')) {
      if (!Trim(level).empty()) most = std::max(most, std::atoi(level.c_str()));
    }
    opts.queue_capacity = static_cast<std::size_t>(std::max(most, g * r * 4));
    pools_.push_back(std::make_unique<ReplicaPool>(opts, stage));
    return std::make_unique<PoolTarget>(*pools_.back(), DefaultPoolWork());
  }
  if (spec.rfind("http://", 0) != 0) {
    throw InvalidArgument("target must be an http:// URL or pool:GxR, got '" + spec + "'");
  }
  return std::make_unique<HttpTarget>(spec, f_.path, DefaultSsmtPayload().dump());
}

void Cli::LoadRun() {
  auto target = MakeTarget(f_.target);
  LoadProfile p;
  p.users = f_.users;
  p.duration_s = f_.duration;
  p.think_time_ms = f_.think;
  p.think_jitter_ms = f_.jitter;
  p.warmup_fraction = f_.warmup;
  p.seed = f_.seed;
  LoadRow row = RunLoad(*target, p);
  if (f_.json) {
    json j = LoadRowToJson(row);
    j["target"] = target->Describe();
    Emit(j);
    return;
  }
  out_ << "users " << row.users << "  median " << Fixed(row.median_ms, 1) << " ms  p95 "
       << Fixed(row.p95_ms, 1) << " ms  max " << Fixed(row.max_ms, 1) << " ms  " << Fixed(row.throughput_rps, 1)
       << " req/s  errors " << row.errors << "  rejected " << row.rejected << "\n";
}

void Cli::LoadSweep() {
  SweepOptions opts;
  for (const auto& level : SplitString(f_.levels, ',')) {
    const std::string t = Trim(level);
    std::size_t used = 0;
    int v = 0;
    try {
      v = std::stoi(t, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (t.empty() || used != t.size()) throw InvalidArgument("bad user level '" + level + "'");
    opts.levels.push_back(v);
  }
  opts.profile.duration_s = f_.duration;
  opts.profile.think_time_ms = f_.think;
  opts.profile.think_jitter_ms = f_.jitter;
  opts.profile.warmup_fraction = f_.warmup;
  opts.profile.seed = f_.seed;
  auto deployed = MakeTarget(f_.deployed);
  std::unique_ptr<LoadTarget> baseline;
  if (!f_.baseline.empty()) baseline = MakeTarget(f_.baseline);
  LoadReport report = Sweep(*deployed, baseline.get(), opts);
  if (!f_.out.empty()) {
    const bool md = std::filesystem::path(f_.out).extension() == ".md";
    WriteFile(f_.out, md ? ReportToMarkdown(report) : ReportToJson(report).dump(2) + "\n");
  }
  if (f_.json) {
    Emit(ReportToJson(report));
  } else {
    out_ << ReportToMarkdown(report);
  }
}

void CollectFlags(CLI::App* app, const std::string& path,
                  std::map<std::string, std::vector<std::string>>& table) {
  auto& flags = table[path];
  for (const CLI::Option* opt : app->get_options()) {
    for (const auto& name : opt->get_lnames()) flags.push_back("--" + name);
  }
  std::sort(flags.begin(), flags.end());
  for (CLI::App* sub : app->get_subcommands({})) {
    CollectFlags(sub, path.empty() ? sub->get_name() : path + " " + sub->get_name(), table);
  }
}

}  // namespace

int RunCli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  Cli cli(out, err);
  return cli.Run(args);
}

std::map<std::string, std::vector<std::string>> CliFlagTable() {
  std::ostringstream sink;
  Cli cli(sink, sink);
  std::map<std::string, std::vector<std::string>> table;
  CollectFlags(&cli.app(), "", table);
  return table;
}

}  // namespace ssmt
