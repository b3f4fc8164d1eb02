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
#ifndef SSMT_DISFLUENCY_DISFLUENCY_H_
#define SSMT_DISFLUENCY_DISFLUENCY_H_

#include <array>
#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "ssmt/textprep/text.h"

namespace ssmt {

enum class DisfluencyType {
  kFilledPause,
  kInterjection,
  kDiscourseMarker,
  kRepetitionCorrection,
  kFalseStart,
  kEdit,
};
inline constexpr int kNumDisfluencyTypes = 6;

std::string_view DisfluencyTypeName(DisfluencyType type);
DisfluencyType ParseDisfluencyType(std::string_view name);

enum class Label : std::uint8_t { kFluent = 0, kDisfluent = 1 };

// Half-open token index range [begin, end).
struct TokenRange {
  size_t begin = 0;
  size_t end = 0;
  bool empty() const { return begin == end; }
  friend bool operator==(const TokenRange&, const TokenRange&) = default;
};

// reparandum <= interregnum <= repair, non-overlapping. Indices refer to
// the input token list, so the interregnum may be empty and the repair may
// be empty (fillers have only an interregnum; false starts have no repair).
struct DisfluentSpan {
  TokenRange reparandum;
  TokenRange interregnum;
  TokenRange repair;
  DisfluencyType type;
};

struct LabeledSentence {
  std::vector<Token> tokens;
  std::vector<Label> labels;

  // Throws InvalidArgument unless labels align 1:1 with tokens.
  void Validate() const;
  std::vector<Token> FluentTokens() const;
  friend bool operator==(const LabeledSentence&, const LabeledSentence&) = default;
};

using Phrase = std::vector<Token>;

// Word lists driving both correction and injection. Each list is a set of
// phrases (one or more tokens). correction_classes holds groups of words
// that substitute for each other in a self-correction ("can't don't").
struct DisfluencyLexicons {
  std::vector<Phrase> filled_pauses;
  std::vector<Phrase> interjections;
  std::vector<Phrase> discourse_markers;
  std::vector<Phrase> edit_phrases;
  std::vector<Phrase> restart_words;
  std::vector<std::vector<Token>> correction_classes;

  // Reads <dir>/{filled_pauses,interjections,discourse_markers,edit_phrases,
  // restart_words,correction_classes}.txt. Entries are normalized for `lang`.
  static DisfluencyLexicons Load(const std::filesystem::path& dir, LangId lang);
  // DataDir()/dc/<lang>/.
  static const DisfluencyLexicons& Default(LangId lang);
};

struct CorrectionResult {
  std::vector<Token> fluent;
  LabeledSentence labeled;
  std::vector<DisfluentSpan> spans;
};

// Rule-based disfluency removal over normalized tokens. Rules run in order,
// each over the tokens that earlier rules left alive:
//   1. filled pauses anywhere;
//   2. interjections anywhere, discourse markers only clause-initially
//      (sentence start, or right after a comma and followed by a comma);
//      a clause-initial entry takes its trailing comma with it;
//   3. edit phrases, removed together with a reparandum whose length is
//      the shortest that makes its last token equal the last token of an
//      equally long repair (1 when nothing matches);
//   4. false starts: "<clause> , <restart word> ... ?" drops the clause;
//   5. repetitions: the longest adjacent repeated n-gram keeps its last
//      copy; adjacent words of one correction class keep the second.
// The output is always a subsequence of the input.
CorrectionResult CorrectDisfluencies(const std::vector<Token>& tokens,
                                     const DisfluencyLexicons& lexicons);

struct InjectionConfig {
  // Probability that one disfluency of each type is injected, indexed by
  // DisfluencyType.
  std::array<double, kNumDisfluencyTypes> probability{};
  int max_repeat_ngram = 3;

  double& operator[](DisfluencyType t) { return probability[static_cast<int>(t)]; }
  double operator[](DisfluencyType t) const { return probability[static_cast<int>(t)]; }

  static InjectionConfig Only(DisfluencyType type);
  // {"filled_pause": p, "interjection": p, "discourse_marker": p,
  //  "repetition": p, "false_start": p, "edit": p, "max_repeat_ngram": n}
  static InjectionConfig FromJson(const std::string& json_text);
};

// Synthetic disfluency injection. Inserted tokens are labeled disfluent and
// originals fluent. The seed fixes every random choice.
LabeledSentence InjectDisfluencies(const std::vector<Token>& fluent,
                                   const InjectionConfig& config,
                                   const DisfluencyLexicons& lexicons,
                                   std::uint64_t seed);

// Precision / recall / F1 of the disfluent class.
struct Prf1 {
  double precision = 0;
  double recall = 0;
  double f1 = 0;
  std::int64_t tp = 0;
  std::int64_t fp = 0;
  std::int64_t fn = 0;
  // Neither side labeled anything disfluent; the scores are reported as 0.
  bool no_positives = false;
};

Prf1 EvaluateLabels(const LabeledSentence& pred, const LabeledSentence& gold);
Prf1 EvaluateLabels(const std::vector<LabeledSentence>& pred,
                    const std::vector<LabeledSentence>& gold);

// token<TAB>{0|1} per line, a blank line between sentences.
std::vector<LabeledSentence> ParseLabelTsv(const std::string& contents);
std::string FormatLabelTsv(const std::vector<LabeledSentence>& sentences);

}  // namespace ssmt

#endif  // SSMT_DISFLUENCY_DISFLUENCY_H_
