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

#include "fedrec/nn/gradients.h"

#include <cmath>

#include "absl/strings/str_cat.h"
#include "fedrec/base/status_macros.h"

namespace fedrec::nn {

absl::StatusOr<std::vector<double>> ComputeGradients(
    const DifferentiableObjective& objective, absl::Span<const double> params) {
  if (params.size() != objective.NumParams()) {
    return absl::InvalidArgumentError(
        absl::StrCat("objective has ", objective.NumParams(),
                     " parameters, got a vector of ", params.size()));
  }
  std::vector<double> gradient;
  FEDREC_ASSIGN_OR_RETURN(const double loss,
                          objective.ValueAndGradient(params, &gradient));
  if (!std::isfinite(loss)) {
    return absl::InvalidArgumentError("non-finite loss");
  }
  if (gradient.size() != params.size()) {
    return absl::InternalError("gradient size does not match parameters");
  }
  for (double g : gradient) {
    if (!std::isfinite(g)) {
      return absl::InvalidArgumentError("non-finite gradient");
    }
  }
  return gradient;
}

}  // namespace fedrec::nn
