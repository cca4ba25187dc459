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

// Reference implementations used as test oracles. They favour directness
// over speed and share no code with the library paths they check.

#ifndef FEDREC_TESTS_SUPPORT_ORACLES_H_
#define FEDREC_TESTS_SUPPORT_ORACLES_H_

#include <filesystem>
#include <functional>
#include <string>
#include <vector>

#include "absl/status/statusor.h"
#include "absl/types/span.h"
#include "fedrec/nn/tensor.h"

namespace fedrec::testing {

// ---------------------------------------------------------------------------
// Finite differences.

struct GradientCheck {
  double max_abs_error = 0;
  double max_rel_error = 0;  // |a - n| / max(|a|, |n|) over checked entries
  int worst_index = -1;
  int checked = 0;
  int failures = 0;  // entries outside rtol (after the absolute floor)
};

using ScalarFn = std::function<absl::StatusOr<double>(absl::Span<const double>)>;

// Compares `analytic` with central differences of `fn` at `params`, entry by
// entry. An entry passes when |a - n| <= rtol * max(|a|, |n|) + atol.
absl::StatusOr<GradientCheck> CheckGradient(const ScalarFn& fn,
                                            absl::Span<const double> params,
                                            absl::Span<const double> analytic,
                                            double step, double rtol,
                                            double atol);

// ---------------------------------------------------------------------------
// Clustering.

// Average-linkage clustering that recomputes every cluster-pair linkage from
// the raw point distances at every step. Ties go to the pair whose smaller
// smallest-member is lowest, then whose larger one is. Clusters are returned
// with sorted members, ordered by smallest member.
std::vector<std::vector<int>> BruteForceAverageLinkage(const nn::Matrix& points,
                                                       double threshold);

// ---------------------------------------------------------------------------
// Metrics. Items are ranked by descending score, ties to the lower position.

// 1-based rank of every item, by counting the items ranked ahead of it.
std::vector<int> BruteRanks(absl::Span<const double> scores);

// Fraction of (positive, negative) pairs with the positive scored strictly
// higher, plus `tie_credit` per tied pair. Negative when a class is missing.
double BruteAuc(absl::Span<const double> scores, absl::Span<const int> labels,
                double tie_credit);
// Mean of 1 / rank over positives. Negative without positives.
double BruteMrr(absl::Span<const double> scores, absl::Span<const int> labels);
// DCG of positives in the top k over the DCG of all positives placed first.
// Negative without positives.
double BruteNdcg(absl::Span<const double> scores, absl::Span<const int> labels,
                 int k);
// Percentage of distinct targets present in the first k recalled entries.
double BruteRecallFraction(const std::vector<int>& targets,
                           const std::vector<int>& recalled, int k);

// ---------------------------------------------------------------------------
// Files.

// Fresh empty directory under the system temp dir, removed on destruction.
class TempDir {
 public:
  explicit TempDir(const std::string& tag);
  ~TempDir();
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;
  const std::filesystem::path& path() const { return path_; }

 private:
  std::filesystem::path path_;
};

std::string ReadFile(const std::filesystem::path& path);

}  // namespace fedrec::testing

#endif  // FEDREC_TESTS_SUPPORT_ORACLES_H_
