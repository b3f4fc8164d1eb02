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
#include "ssmt/textprep/text.h"

#include <unicode/locid.h>
#include <unicode/normalizer2.h>
#include <unicode/uchar.h>
#include <unicode/unistr.h>

#include "ssmt/common/status.h"

namespace ssmt {

namespace {

bool IsMark(char32_t c) {
  return (U_GET_GC_MASK(static_cast<UChar32>(c)) & U_GC_M_MASK) != 0;
}

bool IsLetter(char32_t c) { return u_isalpha(static_cast<UChar32>(c)) || IsMark(c); }
bool IsDigit(char32_t c) { return u_isdigit(static_cast<UChar32>(c)); }

bool IsPunctOrSymbol(char32_t c) {
  auto mask = U_GET_GC_MASK(static_cast<UChar32>(c));
  return (mask & (U_GC_P_MASK | U_GC_S_MASK)) != 0;
}

bool IsApostrophe(char32_t c) { return c == U'\'' || c == U'’'; }

std::u32string ToU32(const icu::UnicodeString& s) {
  std::u32string out;
  out.reserve(s.length());
  for (int32_t i = 0; i < s.length();) {
    UChar32 c = s.char32At(i);
    out.push_back(static_cast<char32_t>(c));
    i += U16_LENGTH(c);
  }
  return out;
}

icu::UnicodeString FromU32(const std::u32string& s) {
  icu::UnicodeString out;
  for (char32_t c : s) out.append(static_cast<UChar32>(c));
  return out;
}

}  // namespace

LangId ParseLang(std::string_view code) {
  if (code == "en") return LangId::kEn;
  if (code == "hi") return LangId::kHi;
  if (code == "mr") return LangId::kMr;
  throw InvalidArgument("unknown language '" + std::string(code) +
                        "' (expected en, hi or mr)");
}

std::string_view LangCode(LangId lang) {
  switch (lang) {
    case LangId::kEn: return "en";
    case LangId::kHi: return "hi";
    case LangId::kMr: return "mr";
  }
  return "??";
}

std::u32string DecodeUtf8(std::string_view text) {
  std::u32string out;
  out.reserve(text.size());
  const auto* p = reinterpret_cast<const unsigned char*>(text.data());
  const auto* end = p + text.size();
  while (p < end) {
    unsigned char b = *p;
    char32_t cp;
    int extra;
    char32_t min;
    if (b < 0x80) {
      cp = b; extra = 0; min = 0;
    } else if ((b & 0xE0) == 0xC0) {
      cp = b & 0x1F; extra = 1; min = 0x80;
    } else if ((b & 0xF0) == 0xE0) {
      cp = b & 0x0F; extra = 2; min = 0x800;
    } else if ((b & 0xF8) == 0xF0) {
      cp = b & 0x07; extra = 3; min = 0x10000;
    } else {
      throw EncodingError("invalid UTF-8 lead byte at offset " +
                          std::to_string(p - reinterpret_cast<const unsigned char*>(text.data())));
    }
    if (end - p <= extra) throw EncodingError("truncated UTF-8 sequence");
    for (int k = 1; k <= extra; ++k) {
      if ((p[k] & 0xC0) != 0x80) throw EncodingError("invalid UTF-8 continuation byte");
      cp = (cp << 6) | (p[k] & 0x3F);
    }
    if (cp < min) throw EncodingError("overlong UTF-8 sequence");
    if (cp > 0x10FFFF || (cp >= 0xD800 && cp <= 0xDFFF))
      throw EncodingError("UTF-8 encodes an invalid code point");
    out.push_back(cp);
    p += extra + 1;
  }
  return out;
}

std::string EncodeUtf8(std::u32string_view text) {
  std::string out;
  out.reserve(text.size());
  for (char32_t c : text) {
    if (c < 0x80) {
      out.push_back(static_cast<char>(c));
    } else if (c < 0x800) {
      out.push_back(static_cast<char>(0xC0 | (c >> 6)));
      out.push_back(static_cast<char>(0x80 | (c & 0x3F)));
    } else if (c < 0x10000) {
      out.push_back(static_cast<char>(0xE0 | (c >> 12)));
      out.push_back(static_cast<char>(0x80 | ((c >> 6) & 0x3F)));
      out.push_back(static_cast<char>(0x80 | (c & 0x3F)));
    } else {
      out.push_back(static_cast<char>(0xF0 | (c >> 18)));
      out.push_back(static_cast<char>(0x80 | ((c >> 12) & 0x3F)));
      out.push_back(static_cast<char>(0x80 | ((c >> 6) & 0x3F)));
      out.push_back(static_cast<char>(0x80 | (c & 0x3F)));
    }
  }
  return out;
}

bool IsValidUtf8(std::string_view text) {
  try {
    DecodeUtf8(text);
    return true;
  } catch (const EncodingError&) {
    return false;
  }
}

std::vector<std::string> SplitCodePoints(std::string_view text) {
  std::vector<std::string> out;
  for (char32_t c : DecodeUtf8(text)) out.push_back(EncodeUtf8(std::u32string(1, c)));
  return out;
}

NormalizedText Normalize(std::string_view text, LangId lang) {
  std::u32string cps = DecodeUtf8(text);

  UErrorCode status = U_ZERO_ERROR;
  const icu::Normalizer2* nfc = icu::Normalizer2::getNFCInstance(status);
  if (U_FAILURE(status)) throw Error("ICU NFC normalizer unavailable");

  icu::UnicodeString us = nfc->normalize(FromU32(cps), status);
  if (lang == LangId::kEn) {
    us.toLower(icu::Locale::getEnglish());
    us = nfc->normalize(us, status);
  }
  if (U_FAILURE(status)) throw EncodingError(u_errorName(status));

  std::u32string collapsed;
  bool pending_space = false;
  for (char32_t c : ToU32(us)) {
    if (u_isUWhiteSpace(static_cast<UChar32>(c))) {
      pending_space = !collapsed.empty();
      continue;
    }
    if (pending_space) collapsed.push_back(U' ');
    pending_space = false;
    collapsed.push_back(c);
  }
  return NormalizedText(EncodeUtf8(collapsed), lang);
}

std::vector<Token> Tokenize(const NormalizedText& text) {
  std::vector<Token> tokens;
  std::u32string cps = DecodeUtf8(text.text());
  std::u32string cur;
  auto flush = [&] {
    if (!cur.empty()) tokens.push_back(EncodeUtf8(cur));
    cur.clear();
  };
  for (size_t i = 0; i < cps.size(); ++i) {
    char32_t c = cps[i];
    if (u_isUWhiteSpace(static_cast<UChar32>(c))) {
      flush();
      continue;
    }
    if (!IsPunctOrSymbol(c)) {
      cur.push_back(c);
      continue;
    }
    char32_t prev = i > 0 ? cps[i - 1] : U' ';
    char32_t next = i + 1 < cps.size() ? cps[i + 1] : U' ';
    bool internal = false;
    if (IsApostrophe(c)) {
      internal = !cur.empty() && IsLetter(prev) && IsLetter(next);
    } else if (c == U'-') {
      internal = !cur.empty() && (IsLetter(prev) || IsDigit(prev)) &&
                 (IsLetter(next) || IsDigit(next));
    } else if (c == U'.' || c == U',') {
      internal = !cur.empty() && IsDigit(prev) && IsDigit(next);
    }
    if (internal) {
      cur.push_back(c);
    } else {
      flush();
      tokens.push_back(EncodeUtf8(std::u32string(1, c)));
    }
  }
  flush();
  return tokens;
}

std::vector<Token> SplitWhitespace(std::string_view text) {
  std::vector<Token> out;
  std::string cur;
  for (char c : text) {
    if (c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v') {
      if (!cur.empty()) out.push_back(std::move(cur));
      cur.clear();
    } else {
      cur.push_back(c);
    }
  }
  if (!cur.empty()) out.push_back(std::move(cur));
  return out;
}

std::string JoinTokens(const std::vector<Token>& tokens) {
  std::string out;
  for (const auto& t : tokens) {
    if (!out.empty()) out.push_back(' ');
    out += t;
  }
  return out;
}

}  // namespace ssmt
