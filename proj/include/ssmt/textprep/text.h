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
#ifndef SSMT_TEXTPREP_TEXT_H_
#define SSMT_TEXTPREP_TEXT_H_

#include <string>
#include <string_view>
#include <vector>

namespace ssmt {

enum class LangId { kEn, kHi, kMr };

// "en" / "hi" / "mr". Anything else raises InvalidArgument.
LangId ParseLang(std::string_view code);
std::string_view LangCode(LangId lang);

using Token = std::string;

// Text that went through Normalize(): NFC, single internal spaces, no outer
// whitespace, and lowercase when the language is English. Only Normalize()
// creates one, so holding a NormalizedText is proof of those properties.
class NormalizedText {
 public:
  const std::string& text() const { return text_; }
  LangId lang() const { return lang_; }
  bool empty() const { return text_.empty(); }

  friend bool operator==(const NormalizedText&, const NormalizedText&) = default;

 private:
  friend NormalizedText Normalize(std::string_view text, LangId lang);
  NormalizedText(std::string text, LangId lang)
      : text_(std::move(text)), lang_(lang) {}

  std::string text_;
  LangId lang_;
};

// Throws EncodingError on ill-formed UTF-8.
NormalizedText Normalize(std::string_view text, LangId lang);

// Splits on spaces, then detaches punctuation into single-character tokens.
//
//   character             kept inside a word when
//   ' (U+0027, U+2019)    both neighbours are letters   ("don't")
//   -                     both neighbours are letters or digits
//   . and ,               both neighbours are digits    ("3.5", "1,000")
//   any other P* / S*     never; always its own token
//
// Devanagari dandas are ordinary punctuation. Marks (Mn/Mc) count as
// letters so vowel signs stay attached to their consonant.
std::vector<Token> Tokenize(const NormalizedText& text);

// Whitespace tokenization of already-tokenized text (e.g. corpus lines).
std::vector<Token> SplitWhitespace(std::string_view text);
std::string JoinTokens(const std::vector<Token>& tokens);

bool IsValidUtf8(std::string_view text);
// Code points of well-formed UTF-8; throws EncodingError otherwise.
std::u32string DecodeUtf8(std::string_view text);
std::string EncodeUtf8(std::u32string_view text);
// Each code point of `text` as its own UTF-8 string.
std::vector<std::string> SplitCodePoints(std::string_view text);

}  // namespace ssmt

#endif  // SSMT_TEXTPREP_TEXT_H_
