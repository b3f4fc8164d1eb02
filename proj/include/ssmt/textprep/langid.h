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
#ifndef SSMT_TEXTPREP_LANGID_H_
#define SSMT_TEXTPREP_LANGID_H_

#include <filesystem>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "ssmt/textprep/text.h"

namespace ssmt {

// Words that only occur in Marathi (not Hindi) Devanagari text.
class MarkerList {
 public:
  MarkerList() = default;
  explicit MarkerList(const std::vector<std::string>& words);

  // UTF-8, one word per line; '#' starts a comment.
  static MarkerList Load(const std::filesystem::path& path);
  // data/langid/mr_markers.txt under DataDir().
  static const MarkerList& Default();

  bool Contains(const std::string& word) const { return words_.count(word) > 0; }
  size_t size() const { return words_.size(); }

 private:
  std::set<std::string> words_;
};

struct ScriptCounts {
  size_t latin = 0;
  size_t devanagari = 0;
  size_t other_letters = 0;
};

ScriptCounts CountScripts(std::string_view text);

// Latin-majority text is English. Devanagari-majority text is Marathi when
// at least one token is on the marker list, otherwise Hindi. Ties between
// the two scripts resolve to English. Text with no Latin or Devanagari
// letters raises UndeterminableError.
LangId DetectLanguage(std::string_view text, const MarkerList& markers);
LangId DetectLanguage(std::string_view text);

}  // namespace ssmt

#endif  // SSMT_TEXTPREP_LANGID_H_
