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

#include "fedrec/nn/tensor.h"

#include <algorithm>
#include <cmath>

#include "absl/strings/str_cat.h"

namespace fedrec::nn {

absl::Status CheckFinite(const Matrix& m, absl::string_view what) {
  if (!m.allFinite()) {
    return absl::InvalidArgumentError(
        absl::StrCat(what, " contains non-finite values"));
  }
  return absl::OkStatus();
}

absl::Status CheckFinite(const Vector& v, absl::string_view what) {
  if (!v.allFinite()) {
    return absl::InvalidArgumentError(
        absl::StrCat(what, " contains non-finite values"));
  }
  return absl::OkStatus();
}

Vector Softmax(const Vector& scores) {
  const double max = scores.maxCoeff();
  Vector out = (scores.array() - max).exp();
  out /= out.sum();
  return out;
}

Matrix RowSoftmax(const Matrix& scores) {
  Matrix out(scores.rows(), scores.cols());
  for (Eigen::Index i = 0; i < scores.rows(); ++i) {
    const double max = scores.row(i).maxCoeff();
    out.row(i) = (scores.row(i).array() - max).exp();
    out.row(i) /= out.row(i).sum();
  }
  return out;
}

Matrix GatherRows(const Matrix& m, absl::Span<const int> rows) {
  Matrix out(static_cast<Eigen::Index>(rows.size()), m.cols());
  for (size_t i = 0; i < rows.size(); ++i) out.row(i) = m.row(rows[i]);
  return out;
}

void AppendMatrix(std::string name, Matrix& m, ParamList& out) {
  out.push_back(ParamView{std::move(name), m.data(),
                          static_cast<int>(m.rows()),
                          static_cast<int>(m.cols())});
}

void AppendVector(std::string name, Vector& v, ParamList& out) {
  out.push_back(
      ParamView{std::move(name), v.data(), 1, static_cast<int>(v.size())});
}

size_t TotalSize(const ParamList& params) {
  size_t total = 0;
  for (const ParamView& p : params) total += p.size();
  return total;
}

std::vector<double> Flatten(const ParamList& params) {
  std::vector<double> flat;
  flat.reserve(TotalSize(params));
  for (const ParamView& p : params) {
    flat.insert(flat.end(), p.data, p.data + p.size());
  }
  return flat;
}

absl::Status Unflatten(absl::Span<const double> flat, const ParamList& params) {
  if (flat.size() != TotalSize(params)) {
    return absl::InvalidArgumentError(
        absl::StrCat("parameter vector has ", flat.size(),
                     " entries, manifest expects ", TotalSize(params)));
  }
  size_t offset = 0;
  for (const ParamView& p : params) {
    std::copy_n(flat.data() + offset, p.size(), p.data);
    offset += p.size();
  }
  return absl::OkStatus();
}

void FillUniform(const ParamList& params, double limit, Rng& rng) {
  for (const ParamView& p : params) {
    for (size_t i = 0; i < p.size(); ++i) p.data[i] = rng.Uniform(-limit, limit);
  }
}

void FillZero(const ParamList& params) {
  for (const ParamView& p : params) std::fill_n(p.data, p.size(), 0.0);
}

Matrix DropoutMask(int rows, int cols, double rate, Rng& rng) {
  Matrix mask = Matrix::Ones(rows, cols);
  if (rate <= 0.0) return mask;
  const double keep_scale = 1.0 / (1.0 - rate);
  for (Eigen::Index i = 0; i < mask.size(); ++i) {
    mask.data()[i] = rng.UniformOpen() < rate ? 0.0 : keep_scale;
  }
  return mask;
}

}  // namespace fedrec::nn
