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

#ifndef FEDREC_NN_TENSOR_H_
#define FEDREC_NN_TENSOR_H_

#include <string>
#include <vector>

#include "Eigen/Core"
#include "absl/status/status.h"
#include "absl/strings/string_view.h"
#include "absl/types/span.h"
#include "fedrec/base/random.h"

namespace fedrec::nn {

// Row-major dense matrix; rows are items (news, tokens, channels).
using Matrix =
    Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using Vector = Eigen::VectorXd;

absl::Status CheckFinite(const Matrix& m, absl::string_view what);
absl::Status CheckFinite(const Vector& v, absl::string_view what);

// Numerically stable softmax.
Vector Softmax(const Vector& scores);
// Softmax applied independently to each row.
Matrix RowSoftmax(const Matrix& scores);

// Rows of `m` selected by `rows`, in order.
Matrix GatherRows(const Matrix& m, absl::Span<const int> rows);

// A named, shaped window onto parameter storage owned elsewhere. Parameter
// structs expose their tensors as a ParamList so generic code (flattening,
// checkpoints, federated updates) can treat a model as one flat vector.
struct ParamView {
  std::string name;
  double* data = nullptr;
  int rows = 0;
  int cols = 0;

  size_t size() const { return static_cast<size_t>(rows) * cols; }
};

using ParamList = std::vector<ParamView>;

void AppendMatrix(std::string name, Matrix& m, ParamList& out);
void AppendVector(std::string name, Vector& v, ParamList& out);

size_t TotalSize(const ParamList& params);
std::vector<double> Flatten(const ParamList& params);
// Copies `flat` into the views. `flat.size()` must equal TotalSize(params).
absl::Status Unflatten(absl::Span<const double> flat, const ParamList& params);

void FillUniform(const ParamList& params, double limit, Rng& rng);
void FillZero(const ParamList& params);

// Inverted-dropout mask: each entry is 0 with probability `rate`, otherwise
// 1 / (1 - rate). Returns an all-ones mask when rate == 0.
Matrix DropoutMask(int rows, int cols, double rate, Rng& rng);

}  // namespace fedrec::nn

#endif  // FEDREC_NN_TENSOR_H_
