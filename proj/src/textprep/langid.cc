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
#include "ssmt/textprep/langid.h"

#include <unicode/uchar.h>
#include <unicode/uscript.h>

#include "ssmt/common/io.h"
#include "ssmt/common/status.h"

namespace ssmt {

MarkerList::MarkerList(const std::vector<std::string>& words) {
  for (const auto& w : words) words_.insert(Normalize(w, LangId::kMr).text());
}

MarkerList MarkerList::Load(const std::filesystem::path& path) {
  return MarkerList(ReadEntryList(path));
}

const MarkerList& MarkerList::Default() {
  static const MarkerList list = Load(DataDir() / "langid" / "mr_markers.txt");
  return list;
}

ScriptCounts CountScripts(std::string_view text) {
  ScriptCounts counts;
  for (char32_t c : DecodeUtf8(text)) {
    auto cp = static_cast<UChar32>(c);
    bool letter = u_isalpha(cp) || (U_GET_GC_MASK(cp) & U_GC_M_MASK) != 0;
    if (!letter) continue;
    UErrorCode status = U_ZERO_ERROR;
    UScriptCode script = uscript_getScript(cp, &status);
    if (U_FAILURE(status)) continue;
    if (script == USCRIPT_LATIN) {
      ++counts.latin;
    } else if (script == USCRIPT_DEVANAGARI) {
      ++counts.devanagari;
    } else if (script == USCRIPT_INHERITED &&
               (U_GET_GC_MASK(cp) & U_GC_M_MASK) != 0 && cp >= 0x0900 && cp <= 0x097F) {
      ++counts.devanagari;
    } else {
      ++counts.other_letters;
    }
  }
  return counts;
}

LangId DetectLanguage(std::string_view text, const MarkerList& markers) {
  if (text.empty()) throw UndeterminableError("cannot detect language of empty text");
  ScriptCounts counts = CountScripts(text);
  if (counts.latin == 0 && counts.devanagari == 0)
    throw UndeterminableError("no Latin or Devanagari letters in input");
  if (counts.latin >= counts.devanagari) return LangId::kEn;

  for (const auto& tok : Tokenize(Normalize(text, LangId::kHi)))
    if (markers.Contains(tok)) return LangId::kMr;
  return LangId::kHi;
}

LangId DetectLanguage(std::string_view text) {
  return DetectLanguage(text, MarkerList::Default());
}

}  // namespace ssmt
