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

// Local ranking model. News are encoded from title tokens (word embedding,
// multi-head self-attention, attention pooling), users from the encodings of
// their clicked news (self-attention, attention pooling), and candidates are
// scored by dot product. The news encoder also supplies the frozen news
// representations used by the recall model.

#ifndef FEDREC_RANKING_RANKING_MODEL_H_
#define FEDREC_RANKING_RANKING_MODEL_H_

#include <string>
#include <vector>

#include "absl/status/statusor.h"
#include "absl/types/span.h"
#include "fedrec/base/random.h"
#include "fedrec/nn/attention.h"
#include "fedrec/nn/tensor.h"

namespace fedrec::ranking {

using nn::Matrix;
using nn::Vector;

// Longer click histories keep their most recent entries.
inline constexpr int kMaxUserHistory = 50;

struct RankingConfig {
  int word_dim = 32;
  int dim = 32;
  int heads = 4;
  int head_dim = 8;
  int attention_hidden = 128;
  int negatives = 4;  // K_g
  double dropout = 0.2;
  double init_limit = 0.1;
  double identity_init = 1.0;

  absl::Status Validate() const;
};

struct RankingParams {
  Matrix word_embedding;  // vocab x word_dim; row 0 is padding
  nn::SelfAttentionParams news_attention;
  nn::AttentionPoolParams news_pool;
  nn::SelfAttentionParams user_attention;
  nn::AttentionPoolParams user_pool;
  Vector empty_news;  // stands in for titles without tokens

  static RankingParams Zeros(const RankingConfig& config, int vocab_size);
  static RankingParams Initialize(const RankingConfig& config, int vocab_size,
                                  Rng& rng);
  nn::ParamList Params();
  int dim() const { return news_attention.output_dim(); }
};

// Padding ids are removed before attention, which is equivalent to masking
// them out. Fails on a title with no non-padding tokens.
absl::StatusOr<Vector> EncodeNews(absl::Span<const int> title_tokens,
                                  const RankingParams& params);

// EncodeNews, falling back to the learned empty-title vector.
absl::StatusOr<Vector> EncodeNewsOrEmpty(absl::Span<const int> title_tokens,
                                         const RankingParams& params);

// Encodes every title; row i is news i.
absl::StatusOr<Matrix> EncodeNewsBatch(
    const std::vector<std::vector<int>>& titles, const RankingParams& params);

absl::StatusOr<Vector> EncodeUser(const Matrix& clicked_news_reps,
                                  const RankingParams& params);

struct RankedItem {
  int news = 0;
  double score = 0;
};

// Top `display` candidates by dot product with the user vector, descending,
// ties to the lower news index. `candidate_news[i]` labels row i. Fails when
// `display` exceeds the number of candidates.
absl::StatusOr<std::vector<RankedItem>> RankCandidates(
    const Vector& user, const Matrix& candidate_reps,
    absl::Span<const int> candidate_news, int display);

// Training data of one user. Indices refer to the title table.
struct RankingImpression {
  std::vector<int> clicked;
  std::vector<int> unclicked;
};

struct RankingExample {
  std::vector<int> history;
  std::vector<RankingImpression> impressions;
};

struct RankingLossOptions {
  double dropout = 0.0;
  int negatives = 4;
};

struct RankingLossResult {
  double loss = 0;            // mean over used positives
  int positives = 0;          // behaviors contributing to the loss
  int skipped_impressions = 0;  // lacked `negatives` unclicked items
};

// InfoNCE over each clicked item against `negatives` unclicked items drawn
// from the same impression. Impressions with too few unclicked items are
// skipped and counted. Gradients accumulate into `grads` scaled by
// `grad_scale` when non-null.
absl::StatusOr<RankingLossResult> RankingLoss(
    const RankingExample& example, const std::vector<std::vector<int>>& titles,
    const RankingParams& params, const RankingLossOptions& options, Rng& rng,
    RankingParams* grads, double grad_scale = 1.0);

}  // namespace fedrec::ranking

#endif  // FEDREC_RANKING_RANKING_MODEL_H_
