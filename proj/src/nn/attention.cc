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

#include "fedrec/nn/attention.h"

#include <algorithm>
#include <cmath>

#include "absl/strings/str_cat.h"

namespace fedrec::nn {

AttentionPoolParams AttentionPoolParams::Zeros(int d_in, int hidden) {
  AttentionPoolParams p;
  p.w1 = Matrix::Zero(d_in, hidden);
  p.b1 = Vector::Zero(hidden);
  p.w2 = Vector::Zero(hidden);
  p.b2 = Vector::Zero(1);
  return p;
}

void AttentionPoolParams::AppendTo(const std::string& prefix, ParamList& out) {
  AppendMatrix(prefix + "/w1", w1, out);
  AppendVector(prefix + "/b1", b1, out);
  AppendVector(prefix + "/w2", w2, out);
  AppendVector(prefix + "/b2", b2, out);
}

absl::StatusOr<AttentionPoolResult> AttentionPool(
    const Matrix& input, const AttentionPoolParams& params,
    AttentionPoolCache* cache) {
  if (input.rows() == 0) return absl::InvalidArgumentError("empty cluster");
  if (input.cols() != params.w1.rows()) {
    return absl::InvalidArgumentError(
        absl::StrCat("attention pool expects ", params.w1.rows(),
                     "-dim rows, got ", input.cols()));
  }
  Matrix hidden = input * params.w1;
  hidden.rowwise() += params.b1.transpose();
  hidden = hidden.array().tanh();
  Vector scores = hidden * params.w2;
  scores.array() += params.b2(0);

  AttentionPoolResult result;
  result.weights = Softmax(scores);
  result.pooled = input.transpose() * result.weights;
  if (cache != nullptr) {
    cache->input = input;
    cache->hidden = std::move(hidden);
    cache->weights = result.weights;
  }
  return result;
}

void AttentionPoolBackward(const AttentionPoolCache& cache,
                           const AttentionPoolParams& params,
                           const Vector& d_pooled, Matrix* d_input,
                           AttentionPoolParams& grads) {
  const Vector& w = cache.weights;
  // pooled = H^T w
  const Vector d_weights = cache.input * d_pooled;
  const double dot = w.dot(d_weights);
  const Vector d_scores = w.array() * (d_weights.array() - dot);

  grads.b2(0) += d_scores.sum();
  grads.w2 += cache.hidden.transpose() * d_scores;
  // d(pre-activation) = d_scores * w2^T * (1 - tanh^2)
  Matrix d_pre = d_scores * params.w2.transpose();
  d_pre.array() *= (1.0 - cache.hidden.array().square());
  grads.w1 += cache.input.transpose() * d_pre;
  grads.b1 += d_pre.colwise().sum().transpose();

  if (d_input != nullptr) {
    *d_input = w * d_pooled.transpose();
    *d_input += d_pre * params.w1.transpose();
  }
}

SelfAttentionParams SelfAttentionParams::Zeros(int d_in, int heads,
                                               int head_dim) {
  SelfAttentionParams p;
  p.heads = heads;
  p.head_dim = head_dim;
  p.wq = Matrix::Zero(d_in, heads * head_dim);
  p.wk = Matrix::Zero(d_in, heads * head_dim);
  p.wv = Matrix::Zero(d_in, heads * head_dim);
  return p;
}

void SelfAttentionParams::AppendTo(const std::string& prefix, ParamList& out) {
  AppendMatrix(prefix + "/wq", wq, out);
  AppendMatrix(prefix + "/wk", wk, out);
  AppendMatrix(prefix + "/wv", wv, out);
}

void SelfAttentionParams::AddIdentity(double gain) {
  const Eigen::Index n = std::min(wq.rows(), wq.cols());
  for (Eigen::Index i = 0; i < n; ++i) {
    wq(i, i) += gain;
    wk(i, i) += gain;
    wv(i, i) += gain;
  }
}

absl::StatusOr<Matrix> SelfAttention(const Matrix& input,
                                     const SelfAttentionParams& params,
                                     SelfAttentionCache* cache) {
  if (input.rows() == 0) {
    return absl::InvalidArgumentError("self-attention over zero rows");
  }
  if (input.cols() != params.wq.rows()) {
    return absl::InvalidArgumentError(
        absl::StrCat("self-attention expects ", params.wq.rows(),
                     "-dim rows, got ", input.cols()));
  }
  const int dh = params.head_dim;
  const double scale = 1.0 / std::sqrt(static_cast<double>(dh));
  Matrix q = input * params.wq;
  Matrix k = input * params.wk;
  Matrix v = input * params.wv;
  Matrix output(input.rows(), params.output_dim());
  if (cache != nullptr) cache->attention.clear();
  for (int h = 0; h < params.heads; ++h) {
    const Matrix scores =
        (q.middleCols(h * dh, dh) * k.middleCols(h * dh, dh).transpose()) *
        scale;
    Matrix attention = RowSoftmax(scores);
    output.middleCols(h * dh, dh) = attention * v.middleCols(h * dh, dh);
    if (cache != nullptr) cache->attention.push_back(std::move(attention));
  }
  if (cache != nullptr) {
    cache->input = input;
    cache->q = std::move(q);
    cache->k = std::move(k);
    cache->v = std::move(v);
  }
  return output;
}

void SelfAttentionBackward(const SelfAttentionCache& cache,
                           const SelfAttentionParams& params,
                           const Matrix& d_output, Matrix* d_input,
                           SelfAttentionParams& grads) {
  const int dh = params.head_dim;
  const double scale = 1.0 / std::sqrt(static_cast<double>(dh));
  const Eigen::Index n = cache.input.rows();
  Matrix d_q(n, params.output_dim());
  Matrix d_k(n, params.output_dim());
  Matrix d_v(n, params.output_dim());
  for (int h = 0; h < params.heads; ++h) {
    const Matrix& a = cache.attention[h];
    const auto d_out_h = d_output.middleCols(h * dh, dh);
    const Matrix d_a = d_out_h * cache.v.middleCols(h * dh, dh).transpose();
    d_v.middleCols(h * dh, dh) = a.transpose() * d_out_h;
    // Row-wise softmax backward.
    const Vector row_dot = (d_a.array() * a.array()).rowwise().sum();
    Matrix d_scores = a.array() * (d_a.colwise() - row_dot).array();
    d_scores *= scale;
    d_q.middleCols(h * dh, dh) = d_scores * cache.k.middleCols(h * dh, dh);
    d_k.middleCols(h * dh, dh) =
        d_scores.transpose() * cache.q.middleCols(h * dh, dh);
  }
  grads.wq += cache.input.transpose() * d_q;
  grads.wk += cache.input.transpose() * d_k;
  grads.wv += cache.input.transpose() * d_v;
  if (d_input != nullptr) {
    *d_input = d_q * params.wq.transpose() + d_k * params.wk.transpose() +
               d_v * params.wv.transpose();
  }
}

}  // namespace fedrec::nn
