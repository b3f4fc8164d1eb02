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
#ifndef SSMT_TEXTPREP_BPE_H_
#define SSMT_TEXTPREP_BPE_H_

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "ssmt/textprep/text.h"

namespace ssmt {

using Subword = std::string;
using MergePair = std::pair<std::string, std::string>;

inline constexpr int kDefaultBpeMerges = 24000;
inline constexpr const char* kDefaultEow = "</w>";

// Ordered merge list. Immutable once built; share freely across threads.
class BpeModel {
 public:
  BpeModel(std::vector<MergePair> merges, std::string eow_marker,
           int num_merges_requested);

  const std::vector<MergePair>& merges() const { return merges_; }
  const std::string& eow_marker() const { return eow_; }
  int num_merges_requested() const { return requested_; }

  // Rank of a merge in learned order, or -1.
  int Rank(const MergePair& pair) const;

  // `bpe v1 <eow>` header, then one `left<TAB>right` per merge.
  std::string Serialize() const;
  static BpeModel Parse(const std::string& contents);
  void Save(const std::filesystem::path& path) const;
  static BpeModel Load(const std::filesystem::path& path);

 private:
  std::vector<MergePair> merges_;
  std::string eow_;
  int requested_;
  std::map<MergePair, int> rank_;
};

using WordCounts = std::map<Token, std::int64_t>;

// Greedy most-frequent-pair learning. Words are split into code points plus
// a separate end-of-word symbol. Ties go to the lexicographically smallest
// pair; learning stops once no pair occurs at least twice.
BpeModel LearnBpe(const WordCounts& corpus, int num_merges,
                  const std::string& eow = kDefaultEow);

// Segments one token. A trailing bare end-of-word symbol is folded into
// the subword before it, so "newest" may come back as n e w est</w>.
std::vector<Subword> ApplyBpe(const BpeModel& model, const Token& token);

// Inverse of ApplyBpe: concatenation with the trailing marker removed.
Token JoinSubwords(const BpeModel& model, const std::vector<Subword>& subwords);

WordCounts CountWords(const std::vector<std::string>& lines);

}  // namespace ssmt

#endif  // SSMT_TEXTPREP_BPE_H_
