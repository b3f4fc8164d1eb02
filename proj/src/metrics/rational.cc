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
#include "ssmt/metrics/rational.h"

#include <numeric>

#include "ssmt/common/status.h"

namespace ssmt {

Rational::Rational(std::int64_t num, std::int64_t den) {
  if (den == 0) throw InvalidArgument("zero denominator");
  if (den < 0) {
    num = -num;
    den = -den;
  }
  std::int64_t g = std::gcd(num, den);
  if (g == 0) g = 1;
  num_ = num / g;
  den_ = den / g;
}

Rational Rational::Parse(std::string_view text) {
  auto bad = [&] { return InvalidArgument("not a decimal number: '" + std::string(text) + "'"); };
  if (text.empty()) throw bad();
  size_t i = 0;
  bool neg = false;
  if (text[0] == '-' || text[0] == '+') {
    neg = text[0] == '-';
    ++i;
  }
  std::int64_t num = 0;
  std::int64_t den = 1;
  bool digits = false;
  bool point = false;
  for (; i < text.size(); ++i) {
    char c = text[i];
    if (c == '.' && !point) {
      point = true;
      continue;
    }
    if (c < '0' || c > '9') throw bad();
    if (num > 1'000'000'000'000LL || den > 1'000'000'000'000LL) throw bad();
    num = num * 10 + (c - '0');
    if (point) den *= 10;
    digits = true;
  }
  if (!digits) throw bad();
  return Rational(neg ? -num : num, den);
}

std::string Rational::ToFixed(int places) const {
  std::int64_t scale = 1;
  for (int p = 0; p < places; ++p) scale *= 10;
  bool neg = num_ < 0;
  std::int64_t a = neg ? -num_ : num_;
  // round(a/den * scale) half up = floor((2*a*scale + den) / (2*den))
  __int128 scaled = (static_cast<__int128>(2) * a * scale + den_) / (static_cast<__int128>(2) * den_);
  auto v = static_cast<std::int64_t>(scaled);
  std::string whole = std::to_string(v / scale);
  std::string frac = std::to_string(v % scale);
  while (static_cast<int>(frac.size()) < places) frac.insert(frac.begin(), '0');
  std::string out = (neg && v != 0 ? "-" : "") + whole;
  if (places > 0) out += "." + frac;
  return out;
}

Rational operator+(Rational a, Rational b) {
  return Rational(a.num_ * b.den_ + b.num_ * a.den_, a.den_ * b.den_);
}
Rational operator-(Rational a, Rational b) {
  return Rational(a.num_ * b.den_ - b.num_ * a.den_, a.den_ * b.den_);
}
Rational operator*(Rational a, Rational b) {
  return Rational(a.num_ * b.num_, a.den_ * b.den_);
}
Rational operator/(Rational a, Rational b) {
  if (b.num_ == 0) throw InvalidArgument("division by zero");
  return Rational(a.num_ * b.den_, a.den_ * b.num_);
}
bool operator<(const Rational& a, const Rational& b) {
  return static_cast<__int128>(a.num_) * b.den_ < static_cast<__int128>(b.num_) * a.den_;
}

}  // namespace ssmt
