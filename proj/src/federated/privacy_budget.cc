// Copyright 2026 The fedrec Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "fedrec/federated/privacy_budget.h"

#include <charconv>
#include <cmath>
#include <limits>
#include <numeric>

#include "absl/strings/str_cat.h"
#include "absl/strings/str_format.h"
#include "fedrec/base/status_macros.h"

namespace fedrec::federated {
namespace {

constexpr int64_t kMaxSafe = int64_t{1} << 62;

Rational Reduce(__int128 num, __int128 den) {
  __int128 a = num < 0 ? -num : num;
  __int128 b = den;
  while (b != 0) {
    const __int128 t = a % b;
    a = b;
    b = t;
  }
  if (a == 0) return {0, 1};
  return {static_cast<int64_t>(num / a), static_cast<int64_t>(den / a)};
}

}  // namespace

std::string Rational::ToString() const {
  if (den == 1) return absl::StrCat(num);
  return absl::StrCat(num, "/", den);
}

absl::StatusOr<Rational> DecimalRational(double x) {
  if (!std::isfinite(x) || x < 0) {
    return absl::InvalidArgumentError(
        absl::StrCat("expected a finite non-negative value, got ", x));
  }
  char buf[64];
  const auto [end, ec] =
      std::to_chars(buf, buf + sizeof(buf), x, std::chars_format::scientific);
  if (ec != std::errc()) return absl::InternalError("to_chars failed");
  // d.ddddde[+-]xx
  const std::string_view text(buf, end - buf);
  const size_t e = text.find('e');
  std::string digits;
  for (char c : text.substr(0, e)) {
    if (c != '.') digits.push_back(c);
  }
  int exponent = 0;
  std::from_chars(text.data() + e + 1 + (text[e + 1] == '+'),
                  text.data() + text.size(), exponent);
  exponent -= static_cast<int>(digits.size()) - 1;
  __int128 num = 0;
  for (char c : digits) num = num * 10 + (c - '0');
  __int128 den = 1;
  for (; exponent > 0; --exponent) {
    num *= 10;
    if (num > kMaxSafe) return absl::OutOfRangeError("value too large");
  }
  for (; exponent < 0; ++exponent) {
    den *= 10;
    if (den > kMaxSafe) return absl::OutOfRangeError("value too small");
  }
  return Reduce(num, den);
}

absl::StatusOr<Rational> LaplaceEpsilon(double clip, double noise) {
  if (!(noise > 0)) {
    return absl::InvalidArgumentError("noise scale 0 gives no finite bound");
  }
  FEDREC_ASSIGN_OR_RETURN(const Rational c, DecimalRational(clip));
  FEDREC_ASSIGN_OR_RETURN(const Rational n, DecimalRational(noise));
  const __int128 num = static_cast<__int128>(2) * c.num * n.den;
  const __int128 den = static_cast<__int128>(c.den) * n.num;
  const Rational reduced = Reduce(num, den);
  if (reduced.num > kMaxSafe || reduced.den > kMaxSafe) {
    return absl::OutOfRangeError("epsilon not representable");
  }
  return reduced;
}

std::string PrivacyReport::ToJson() const {
  auto number = [](double v) {
    return std::isfinite(v) ? absl::StrFormat("%.17g", v) : "null";
  };
  return absl::StrFormat(
      "{\"epsilon_gradient\":\"%s\",\"epsilon_gradient_value\":%s,"
      "\"epsilon_interest\":\"%s\",\"epsilon_interest_value\":%s}",
      gradient, number(gradient_value), interest, number(interest_value));
}

PrivacyReport MakePrivacyReport(double gradient_clip, double gradient_noise,
                                double interest_clip, double interest_noise) {
  PrivacyReport report;
  auto fill = [](double clip, double noise, std::string& text, double& value) {
    absl::StatusOr<Rational> eps = LaplaceEpsilon(clip, noise);
    if (eps.ok()) {
      text = eps->ToString();
      value = eps->ToDouble();
    } else {
      text = "inf";
      value = std::numeric_limits<double>::infinity();
    }
  };
  fill(gradient_clip, gradient_noise, report.gradient, report.gradient_value);
  fill(interest_clip, interest_noise, report.interest, report.interest_value);
  return report;
}

}  // namespace fedrec::federated
