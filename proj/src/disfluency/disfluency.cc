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
#include "ssmt/disfluency/disfluency.h"

#include <algorithm>
#include <cctype>
#include <map>
#include <random>
#include <sstream>

#include "json.hpp"
#include "ssmt/common/io.h"
#include "ssmt/common/status.h"

namespace ssmt {

namespace {

constexpr std::array<std::string_view, kNumDisfluencyTypes> kTypeNames = {
    "filled_pause", "interjection", "discourse_marker",
    "repetition", "false_start", "edit"};

constexpr size_t kMaxEditReparandum = 4;

std::vector<Phrase> LoadPhrases(const std::filesystem::path& file, LangId lang) {
  std::vector<Phrase> phrases;
  for (const auto& entry : ReadEntryList(file)) {
    Phrase p = Tokenize(Normalize(entry, lang));
    if (!p.empty()) phrases.push_back(std::move(p));
  }
  // Longest first so multi-word entries win over their prefixes.
  std::stable_sort(phrases.begin(), phrases.end(),
                   [](const Phrase& a, const Phrase& b) { return a.size() > b.size(); });
  return phrases;
}

// Tokens still alive, addressed by position in the view.
class AliveView {
 public:
  AliveView(const std::vector<Token>& tokens, const std::vector<bool>& alive)
      : tokens_(tokens) {
    for (size_t i = 0; i < tokens.size(); ++i)
      if (alive[i]) idx_.push_back(i);
    removed_.assign(idx_.size(), false);
  }

  size_t size() const { return idx_.size(); }
  const Token& at(size_t k) const { return tokens_[idx_[k]]; }
  size_t index(size_t k) const { return idx_[k]; }
  bool removed(size_t k) const { return removed_[k]; }
  void Remove(size_t k) { removed_[k] = true; }

  // Previous view position not removed in this pass, or npos.
  size_t Prev(size_t k) const {
    while (k > 0) {
      --k;
      if (!removed_[k]) return k;
    }
    return npos;
  }
  size_t Next(size_t k) const {
    for (++k; k < idx_.size(); ++k)
      if (!removed_[k]) return k;
    return npos;
  }

  // Length of the longest phrase matching at k over not-removed positions;
  // `last` receives the view position of its final token.
  size_t Match(size_t k, const std::vector<Phrase>& phrases, size_t* last) const {
    for (const auto& p : phrases) {
      size_t pos = k;
      size_t matched = 0;
      while (matched < p.size() && pos != npos && at(pos) == p[matched]) {
        ++matched;
        if (matched < p.size()) pos = Next(pos);
      }
      if (matched == p.size()) {
        *last = pos;
        return p.size();
      }
    }
    return 0;
  }

  void Commit(std::vector<bool>& alive) const {
    for (size_t k = 0; k < idx_.size(); ++k)
      if (removed_[k]) alive[idx_[k]] = false;
  }

  static constexpr size_t npos = static_cast<size_t>(-1);

 private:
  const std::vector<Token>& tokens_;
  std::vector<size_t> idx_;
  std::vector<bool> removed_;
};

TokenRange Span(const AliveView& v, size_t first, size_t last) {
  return {v.index(first), v.index(last) + 1};
}

TokenRange At(size_t i) { return {i, i}; }

bool InClass(const std::vector<std::vector<Token>>& classes, const Token& a,
             const Token& b) {
  for (const auto& cls : classes) {
    bool has_a = std::find(cls.begin(), cls.end(), a) != cls.end();
    bool has_b = std::find(cls.begin(), cls.end(), b) != cls.end();
    if (has_a && has_b) return true;
  }
  return false;
}

void RemoveFilledPauses(const std::vector<Token>& tokens, std::vector<bool>& alive,
                        const DisfluencyLexicons& lex, std::vector<DisfluentSpan>& spans) {
  AliveView v(tokens, alive);
  for (size_t k = 0; k < v.size(); ++k) {
    size_t last;
    if (v.removed(k) || !v.Match(k, lex.filled_pauses, &last)) continue;
    for (size_t j = k; j <= last; ++j) v.Remove(j);
    spans.push_back({At(v.index(k)), Span(v, k, last), At(v.index(last) + 1),
                     DisfluencyType::kFilledPause});
    k = last;
  }
  v.Commit(alive);
}

void RemoveMarkers(const std::vector<Token>& tokens, std::vector<bool>& alive,
                   const DisfluencyLexicons& lex, std::vector<DisfluentSpan>& spans) {
  AliveView v(tokens, alive);
  for (size_t k = 0; k < v.size(); ++k) {
    if (v.removed(k)) continue;
    size_t prev = v.Prev(k);
    bool sentence_initial = prev == AliveView::npos;
    bool after_comma = !sentence_initial && v.at(prev) == ",";
    size_t last = 0;
    DisfluencyType type = DisfluencyType::kInterjection;
    bool hit = v.Match(k, lex.interjections, &last) > 0;
    if (!hit && (sentence_initial || after_comma)) {
      hit = v.Match(k, lex.discourse_markers, &last) > 0;
      type = DisfluencyType::kDiscourseMarker;
    }
    if (!hit) continue;
    size_t next = v.Next(last);
    bool comma_follows = next != AliveView::npos && v.at(next) == ",";
    // Mid-sentence discourse markers must be comma-delimited on both sides.
    if (type == DisfluencyType::kDiscourseMarker && after_comma && !comma_follows) continue;
    for (size_t j = k; j <= last; ++j) v.Remove(j);
    size_t end = last;
    if ((sentence_initial || after_comma) && comma_follows) {
      v.Remove(next);
      end = next;
    }
    spans.push_back({At(v.index(k)), Span(v, k, end), At(v.index(end) + 1), type});
    k = end;
  }
  v.Commit(alive);
}

void RemoveEdits(const std::vector<Token>& tokens, std::vector<bool>& alive,
                 const DisfluencyLexicons& lex, std::vector<DisfluentSpan>& spans) {
  AliveView v(tokens, alive);
  const size_t m = v.size();
  size_t floor = 0;  // positions below this belong to an earlier edit
  for (size_t k = 1; k < m; ++k) {
    size_t last;
    if (!v.Match(k, lex.edit_phrases, &last)) continue;
    size_t inter_begin = k;
    size_t before_end = k;  // one past the last reparandum candidate
    if (v.at(k - 1) == ",") {
      inter_begin = k - 1;
      before_end = k - 1;
    }
    size_t after = last + 1;
    if (after < m && v.at(after) == ",") ++after;
    if (before_end <= floor || after >= m) continue;

    size_t limit = std::min({kMaxEditReparandum, before_end - floor, m - after});
    size_t len = 1;
    for (size_t l = 1; l <= limit; ++l) {
      if (v.at(before_end - 1) == v.at(after + l - 1)) {
        len = l;
        break;
      }
    }
    size_t rep_begin = before_end - len;
    for (size_t j = rep_begin; j < after; ++j) v.Remove(j);
    spans.push_back({Span(v, rep_begin, before_end - 1), Span(v, inter_begin, after - 1),
                     Span(v, after, after + len - 1), DisfluencyType::kEdit});
    floor = after;
    k = after - 1;
  }
  v.Commit(alive);
}

void RemoveFalseStart(const std::vector<Token>& tokens, std::vector<bool>& alive,
                      const DisfluencyLexicons& lex, std::vector<DisfluentSpan>& spans) {
  AliveView v(tokens, alive);
  const size_t m = v.size();
  if (m < 4 || v.at(m - 1) != "?") return;
  size_t unused;
  if (v.Match(0, lex.restart_words, &unused)) return;
  for (size_t c = 1; c + 2 < m; ++c) {
    if (v.at(c) != ",") continue;
    if (!v.Match(c + 1, lex.restart_words, &unused)) continue;
    for (size_t j = 0; j <= c; ++j) v.Remove(j);
    spans.push_back({Span(v, 0, c - 1), Span(v, c, c), Span(v, c + 1, m - 1),
                     DisfluencyType::kFalseStart});
    break;
  }
  v.Commit(alive);
}

void CollapseRepetitions(const std::vector<Token>& tokens, std::vector<bool>& alive,
                         const DisfluencyLexicons& lex, std::vector<DisfluentSpan>& spans) {
  AliveView v(tokens, alive);
  const size_t m = v.size();
  size_t i = 0;
  while (i < m) {
    size_t found = 0;
    for (size_t n = (m - i) / 2; n >= 1; --n) {
      bool same = true;
      for (size_t t = 0; t < n && same; ++t) same = v.at(i + t) == v.at(i + n + t);
      if (same) {
        found = n;
        break;
      }
    }
    if (found) {
      for (size_t t = 0; t < found; ++t) v.Remove(i + t);
      spans.push_back({Span(v, i, i + found - 1), At(v.index(i + found)),
                       Span(v, i + found, i + 2 * found - 1),
                       DisfluencyType::kRepetitionCorrection});
      i += found;
      continue;
    }
    if (i + 1 < m && v.at(i) != v.at(i + 1) &&
        InClass(lex.correction_classes, v.at(i), v.at(i + 1))) {
      v.Remove(i);
      spans.push_back({Span(v, i, i), At(v.index(i + 1)), Span(v, i + 1, i + 1),
                       DisfluencyType::kRepetitionCorrection});
    }
    ++i;
  }
  v.Commit(alive);
}

const Phrase& Pick(const std::vector<Phrase>& phrases, std::mt19937_64& rng,
                   const char* what) {
  if (phrases.empty())
    throw ConfigError(std::string("lexicon has no ") + what + " entries");
  std::uniform_int_distribution<size_t> d(0, phrases.size() - 1);
  return phrases[d(rng)];
}

struct Item {
  Token token;
  Label label;
};

bool IsNumber(const Token& t) {
  return !t.empty() && std::all_of(t.begin(), t.end(), [](char c) { return c >= '0' && c <= '9'; });
}

}  // namespace

std::string_view DisfluencyTypeName(DisfluencyType type) {
  return kTypeNames[static_cast<int>(type)];
}

DisfluencyType ParseDisfluencyType(std::string_view name) {
  for (int i = 0; i < kNumDisfluencyTypes; ++i)
    if (kTypeNames[i] == name) return static_cast<DisfluencyType>(i);
  throw InvalidArgument("unknown disfluency type '" + std::string(name) + "'");
}

void LabeledSentence::Validate() const {
  if (tokens.size() != labels.size())
    throw InvalidArgument("label count " + std::to_string(labels.size()) +
                          " != token count " + std::to_string(tokens.size()));
}

std::vector<Token> LabeledSentence::FluentTokens() const {
  Validate();
  std::vector<Token> out;
  for (size_t i = 0; i < tokens.size(); ++i)
    if (labels[i] == Label::kFluent) out.push_back(tokens[i]);
  return out;
}

DisfluencyLexicons DisfluencyLexicons::Load(const std::filesystem::path& dir, LangId lang) {
  DisfluencyLexicons lex;
  lex.filled_pauses = LoadPhrases(dir / "filled_pauses.txt", lang);
  lex.interjections = LoadPhrases(dir / "interjections.txt", lang);
  lex.discourse_markers = LoadPhrases(dir / "discourse_markers.txt", lang);
  lex.edit_phrases = LoadPhrases(dir / "edit_phrases.txt", lang);
  lex.restart_words = LoadPhrases(dir / "restart_words.txt", lang);
  for (const auto& line : ReadEntryList(dir / "correction_classes.txt")) {
    auto cls = SplitWhitespace(Normalize(line, lang).text());
    if (cls.size() >= 2) lex.correction_classes.push_back(std::move(cls));
  }
  return lex;
}

const DisfluencyLexicons& DisfluencyLexicons::Default(LangId lang) {
  // Marathi shares the Hindi (Devanagari) lexicons.
  static const DisfluencyLexicons en = Load(DataDir() / "dc" / "en", LangId::kEn);
  static const DisfluencyLexicons hi = Load(DataDir() / "dc" / "hi", LangId::kHi);
  return lang == LangId::kEn ? en : hi;
}

CorrectionResult CorrectDisfluencies(const std::vector<Token>& tokens,
                                     const DisfluencyLexicons& lexicons) {
  CorrectionResult result;
  std::vector<bool> alive(tokens.size(), true);
  RemoveFilledPauses(tokens, alive, lexicons, result.spans);
  RemoveMarkers(tokens, alive, lexicons, result.spans);
  RemoveEdits(tokens, alive, lexicons, result.spans);
  RemoveFalseStart(tokens, alive, lexicons, result.spans);
  CollapseRepetitions(tokens, alive, lexicons, result.spans);

  result.labeled.tokens = tokens;
  result.labeled.labels.resize(tokens.size());
  for (size_t i = 0; i < tokens.size(); ++i) {
    result.labeled.labels[i] = alive[i] ? Label::kFluent : Label::kDisfluent;
    if (alive[i]) result.fluent.push_back(tokens[i]);
  }
  std::sort(result.spans.begin(), result.spans.end(),
            [](const DisfluentSpan& a, const DisfluentSpan& b) {
              return a.reparandum.begin < b.reparandum.begin;
            });
  return result;
}

InjectionConfig InjectionConfig::Only(DisfluencyType type) {
  InjectionConfig c;
  c[type] = 1.0;
  return c;
}

InjectionConfig InjectionConfig::FromJson(const std::string& json_text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(json_text);
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(std::string("injection config: ") + e.what());
  }
  if (!j.is_object()) throw FormatError("injection config must be a JSON object");
  InjectionConfig c;
  for (auto it = j.begin(); it != j.end(); ++it) {
    if (it.key() == "max_repeat_ngram") {
      c.max_repeat_ngram = it.value().get<int>();
      if (c.max_repeat_ngram < 1) throw InvalidArgument("max_repeat_ngram must be >= 1");
      continue;
    }
    double p = it.value().get<double>();
    if (!(p >= 0.0 && p <= 1.0))
      throw InvalidArgument("probability for '" + it.key() + "' outside [0, 1]");
    c[ParseDisfluencyType(it.key())] = p;
  }
  return c;
}

LabeledSentence InjectDisfluencies(const std::vector<Token>& fluent,
                                   const InjectionConfig& config,
                                   const DisfluencyLexicons& lexicons,
                                   std::uint64_t seed) {
  if (fluent.empty()) throw InvalidArgument("cannot inject into an empty sentence");
  std::mt19937_64 rng(seed);
  auto draw = [&](DisfluencyType t) {
    return std::bernoulli_distribution(config[t])(rng);
  };
  auto uniform = [&](size_t lo, size_t hi) {
    return std::uniform_int_distribution<size_t>(lo, hi)(rng);
  };

  std::vector<Item> s;
  for (const auto& t : fluent) s.push_back({t, Label::kFluent});
  auto insert = [&](size_t at, const std::vector<Token>& toks) {
    std::vector<Item> items;
    for (const auto& t : toks) items.push_back({t, Label::kDisfluent});
    s.insert(s.begin() + static_cast<std::ptrdiff_t>(at), items.begin(), items.end());
  };

  if (draw(DisfluencyType::kRepetitionCorrection)) {
    size_t n = uniform(1, std::min<size_t>(config.max_repeat_ngram, s.size()));
    size_t at = uniform(0, s.size() - n);
    std::vector<Token> copy;
    for (size_t t = 0; t < n; ++t) copy.push_back(s[at + t].token);
    insert(at, copy);
  }

  if (draw(DisfluencyType::kEdit)) {
    std::vector<size_t> words;
    for (size_t i = 0; i < s.size(); ++i)
      if (s[i].label == Label::kFluent && s[i].token != "," && s[i].token.size() > 1)
        words.push_back(i);
    if (!words.empty()) {
      size_t at = words[uniform(0, words.size() - 1)];
      const Token& target = s[at].token;
      Token wrong;
      if (IsNumber(target)) {
        wrong = std::to_string(std::stoll(target.substr(0, 15)) + 1);
      } else {
        // Another word of the sentence, or a truncated copy of the target.
        size_t other = words[uniform(0, words.size() - 1)];
        wrong = s[other].token != target ? s[other].token
                                         : target.substr(0, target.size() / 2);
      }
      std::vector<Token> toks{wrong};
      const Phrase& phrase = Pick(lexicons.edit_phrases, rng, "edit phrase");
      toks.insert(toks.end(), phrase.begin(), phrase.end());
      insert(at, toks);
    }
  }

  if (draw(DisfluencyType::kFalseStart)) {
    // The abandoned clause reuses words from later in the sentence.
    std::vector<Token> pool;
    for (size_t i = 1; i < fluent.size(); ++i)
      if (fluent[i].size() > 1 || std::isalnum(static_cast<unsigned char>(fluent[i][0])))
        pool.push_back(fluent[i]);
    if (pool.empty()) pool.push_back(fluent[0]);
    size_t k = uniform(1, std::min<size_t>(3, pool.size()));
    std::vector<Token> prefix;
    for (size_t i = 0; i < k; ++i) prefix.push_back(pool[uniform(0, pool.size() - 1)]);
    prefix.push_back(",");
    insert(0, prefix);
  }

  for (DisfluencyType t : {DisfluencyType::kDiscourseMarker, DisfluencyType::kInterjection}) {
    if (!draw(t)) continue;
    std::vector<size_t> slots{0};
    for (size_t i = 0; i + 1 < s.size(); ++i)
      if (s[i].label == Label::kFluent && s[i].token == ",") slots.push_back(i + 1);
    size_t at = slots[uniform(0, slots.size() - 1)];
    const auto& list = t == DisfluencyType::kDiscourseMarker ? lexicons.discourse_markers
                                                             : lexicons.interjections;
    Phrase toks = Pick(list, rng, t == DisfluencyType::kDiscourseMarker
                                      ? "discourse marker" : "interjection");
    toks.push_back(",");
    insert(at, toks);
  }

  if (draw(DisfluencyType::kFilledPause)) {
    size_t at = uniform(0, s.size());
    insert(at, Pick(lexicons.filled_pauses, rng, "filled pause"));
  }

  LabeledSentence out;
  for (auto& item : s) {
    out.tokens.push_back(std::move(item.token));
    out.labels.push_back(item.label);
  }
  return out;
}

Prf1 EvaluateLabels(const std::vector<LabeledSentence>& pred,
                    const std::vector<LabeledSentence>& gold) {
  if (pred.size() != gold.size())
    throw InvalidArgument("sentence count mismatch: " + std::to_string(pred.size()) +
                          " vs " + std::to_string(gold.size()));
  Prf1 r;
  for (size_t s = 0; s < pred.size(); ++s) {
    pred[s].Validate();
    gold[s].Validate();
    if (pred[s].labels.size() != gold[s].labels.size())
      throw InvalidArgument("token count mismatch in sentence " + std::to_string(s));
    for (size_t i = 0; i < pred[s].labels.size(); ++i) {
      bool p = pred[s].labels[i] == Label::kDisfluent;
      bool g = gold[s].labels[i] == Label::kDisfluent;
      r.tp += p && g;
      r.fp += p && !g;
      r.fn += !p && g;
    }
  }
  r.no_positives = r.tp + r.fp + r.fn == 0;
  if (r.tp + r.fp > 0) r.precision = static_cast<double>(r.tp) / static_cast<double>(r.tp + r.fp);
  if (r.tp + r.fn > 0) r.recall = static_cast<double>(r.tp) / static_cast<double>(r.tp + r.fn);
  if (r.tp > 0) r.f1 = 2 * r.precision * r.recall / (r.precision + r.recall);
  return r;
}

Prf1 EvaluateLabels(const LabeledSentence& pred, const LabeledSentence& gold) {
  return EvaluateLabels(std::vector<LabeledSentence>{pred}, std::vector<LabeledSentence>{gold});
}

std::vector<LabeledSentence> ParseLabelTsv(const std::string& contents) {
  std::vector<LabeledSentence> out;
  LabeledSentence cur;
  std::istringstream in(contents);
  std::string line;
  int lineno = 0;
  auto flush = [&] {
    if (!cur.tokens.empty()) out.push_back(std::move(cur));
    cur = {};
  };
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) {
      flush();
      continue;
    }
    auto tab = line.rfind('\t');
    if (tab == std::string::npos || tab == 0)
      throw FormatError("label TSV line " + std::to_string(lineno) + ": expected token<TAB>label");
    std::string label = line.substr(tab + 1);
    if (label != "0" && label != "1")
      throw FormatError("label TSV line " + std::to_string(lineno) + ": label must be 0 or 1");
    cur.tokens.push_back(line.substr(0, tab));
    cur.labels.push_back(label == "1" ? Label::kDisfluent : Label::kFluent);
  }
  flush();
  return out;
}

std::string FormatLabelTsv(const std::vector<LabeledSentence>& sentences) {
  std::string out;
  for (size_t s = 0; s < sentences.size(); ++s) {
    sentences[s].Validate();
    if (s > 0) out += "\n";
    for (size_t i = 0; i < sentences[s].tokens.size(); ++i) {
      out += sentences[s].tokens[i];
      out += sentences[s].labels[i] == Label::kDisfluent ? "\t1\n" : "\t0\n";
    }
  }
  return out;
}

}  // namespace ssmt
