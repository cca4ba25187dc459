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

#ifndef FEDREC_FEDERATED_PRIVACY_BUDGET_H_
#define FEDREC_FEDERATED_PRIVACY_BUDGET_H_

#include <cstdint>
#include <string>

#include "absl/status/statusor.h"

namespace fedrec::federated {

// Reduced non-negative fraction.
struct Rational {
  int64_t num = 0;
  int64_t den = 1;

  double ToDouble() const { return static_cast<double>(num) / den; }
  std::string ToString() const;  // "20", "1/3"
  friend bool operator==(const Rational&, const Rational&) = default;
};

// The value of the shortest decimal string that round-trips to `x`, as an
// exact fraction. 0.1 becomes 1/10 rather than the binary expansion.
absl::StatusOr<Rational> DecimalRational(double x);

// Laplace-mechanism epsilon for a quantity clamped to [-clip, clip] with noise
// scale `noise`: 2 * clip / noise. Computed on the decimal values so that,
// e.g., clip 0.2 and noise 1.2 give exactly 1/3. Fails for noise == 0, where
// no finite bound exists.
absl::StatusOr<Rational> LaplaceEpsilon(double clip, double noise);

struct PrivacyReport {
  std::string gradient;  // epsilon_g, or "inf"
  std::string interest;  // epsilon_I, or "inf"
  double gradient_value = 0;
  double interest_value = 0;

  std::string ToJson() const;
};

PrivacyReport MakePrivacyReport(double gradient_clip, double gradient_noise,
                                double interest_clip, double interest_noise);

}  // namespace fedrec::federated

#endif  // FEDREC_FEDERATED_PRIVACY_BUDGET_H_
