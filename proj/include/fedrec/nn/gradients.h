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

#ifndef FEDREC_NN_GRADIENTS_H_
#define FEDREC_NN_GRADIENTS_H_

#include <functional>
#include <vector>

#include "absl/status/statusor.h"
#include "absl/types/span.h"

namespace fedrec::nn {

// A scalar objective over a flat parameter vector with an analytic gradient.
class DifferentiableObjective {
 public:
  virtual ~DifferentiableObjective() = default;

  virtual size_t NumParams() const = 0;
  // Writes dValue/dparams into `gradient` (resized by the callee).
  virtual absl::StatusOr<double> ValueAndGradient(
      absl::Span<const double> params, std::vector<double>* gradient) const = 0;

  virtual absl::StatusOr<double> Value(absl::Span<const double> params) const {
    std::vector<double> unused;
    return ValueAndGradient(params, &unused);
  }
};

// Adapts a pair of lambdas to DifferentiableObjective.
class LambdaObjective : public DifferentiableObjective {
 public:
  using Fn = std::function<absl::StatusOr<double>(absl::Span<const double>,
                                                  std::vector<double>*)>;
  LambdaObjective(size_t num_params, Fn fn)
      : num_params_(num_params), fn_(std::move(fn)) {}

  size_t NumParams() const override { return num_params_; }
  absl::StatusOr<double> ValueAndGradient(
      absl::Span<const double> params,
      std::vector<double>* gradient) const override {
    return fn_(params, gradient);
  }

 private:
  size_t num_params_;
  Fn fn_;
};

// Evaluates the objective's analytic gradient at `params`. Fails with
// InvalidArgument on a non-finite loss or gradient, or a size mismatch.
absl::StatusOr<std::vector<double>> ComputeGradients(
    const DifferentiableObjective& objective, absl::Span<const double> params);

}  // namespace fedrec::nn

#endif  // FEDREC_NN_GRADIENTS_H_
