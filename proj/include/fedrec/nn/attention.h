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

// Attention building blocks shared by the recall and ranking models. Each
// layer has a forward pass that optionally records a cache, and a backward
// pass that consumes the cache and *accumulates* parameter gradients into a
// parameter struct of the same shape.

#ifndef FEDREC_NN_ATTENTION_H_
#define FEDREC_NN_ATTENTION_H_

#include <string>

#include "absl/status/statusor.h"
#include "fedrec/base/random.h"
#include "fedrec/nn/tensor.h"

namespace fedrec::nn {

// Additive attention pooling: score_j = w2 . tanh(W1^T h_j + b1) + b2,
// weights = softmax(score), pooled = sum_j weights_j h_j.
struct AttentionPoolParams {
  Matrix w1;  // d_in x hidden
  Vector b1;  // hidden
  Vector w2;  // hidden
  Vector b2;  // size 1

  static AttentionPoolParams Zeros(int d_in, int hidden);
  int input_dim() const { return static_cast<int>(w1.rows()); }
  int hidden_dim() const { return static_cast<int>(w1.cols()); }
  void AppendTo(const std::string& prefix, ParamList& out);
};

struct AttentionPoolResult {
  Vector pooled;
  Vector weights;
};

struct AttentionPoolCache {
  Matrix input;
  Matrix hidden;  // tanh activations, n x hidden
  Vector weights;
};

absl::StatusOr<AttentionPoolResult> AttentionPool(
    const Matrix& input, const AttentionPoolParams& params,
    AttentionPoolCache* cache = nullptr);

// Given dLoss/dpooled, accumulates parameter gradients into `grads` and
// writes dLoss/dinput to `d_input` (may be null).
void AttentionPoolBackward(const AttentionPoolCache& cache,
                           const AttentionPoolParams& params,
                           const Vector& d_pooled, Matrix* d_input,
                           AttentionPoolParams& grads);

// Multi-head scaled dot-product self-attention without residual connection
// or normalization. Head h uses columns [h*head_dim, (h+1)*head_dim) of the
// projection matrices; outputs of all heads are concatenated.
struct SelfAttentionParams {
  int heads = 0;
  int head_dim = 0;
  Matrix wq;  // d_in x (heads * head_dim)
  Matrix wk;
  Matrix wv;

  static SelfAttentionParams Zeros(int d_in, int heads, int head_dim);
  int input_dim() const { return static_cast<int>(wq.rows()); }
  int output_dim() const { return heads * head_dim; }
  void AppendTo(const std::string& prefix, ParamList& out);
  // Adds `gain` on the diagonal of the query/key/value projections so that
  // attention starts out similarity-driven and values start close to the
  // inputs.
  void AddIdentity(double gain);
};

struct SelfAttentionCache {
  Matrix input;
  Matrix q, k, v;
  std::vector<Matrix> attention;  // per head, n x n
};

absl::StatusOr<Matrix> SelfAttention(const Matrix& input,
                                     const SelfAttentionParams& params,
                                     SelfAttentionCache* cache = nullptr);

void SelfAttentionBackward(const SelfAttentionCache& cache,
                           const SelfAttentionParams& params,
                           const Matrix& d_output, Matrix* d_input,
                           SelfAttentionParams& grads);

}  // namespace fedrec::nn

#endif  // FEDREC_NN_ATTENTION_H_
