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

#include <algorithm>
#include <cmath>

#include "absl/strings/str_cat.h"
#include "fedrec/base/status_macros.h"
#include "fedrec/recall/recall_model.h"

namespace fedrec::recall {
namespace {

struct ChannelState {
  std::vector<int> rows;
  nn::AttentionPoolCache pool_cache;
  Vector interest;  // r_i
  Vector scores;    // a_i
  Vector alpha;
  Vector protected_rep;
  double ratio = 0;
};

}  // namespace

absl::StatusOr<double> RecallLoss(const RecallExample& example,
                                  const Matrix& news_reps,
                                  const RecallParams& params,
                                  const RecallConfig& config,
                                  const RecallLossOptions& options, Rng& rng,
                                  RecallParams* grads, double grad_scale) {
  if (example.history.empty()) return absl::InvalidArgumentError("cold user");
  if (example.positives.empty()) {
    return absl::InvalidArgumentError("user has no positive behaviors");
  }
  const int k = options.negatives;
  if (static_cast<int>(example.negative_pool.size()) < k) {
    return absl::InvalidArgumentError(absl::StrCat(
        "insufficient negatives: ", example.negative_pool.size(),
        " displayed-but-unclicked news, need ", k));
  }

  // Randomness is consumed in a fixed order: negatives, dropout, noise.
  std::vector<std::vector<int>> negatives;
  negatives.reserve(example.positives.size());
  for (size_t p = 0; p < example.positives.size(); ++p) {
    std::vector<int> picks = rng.SampleWithoutReplacement(
        static_cast<int>(example.negative_pool.size()), k);
    for (int& i : picks) i = example.negative_pool[i];
    negatives.push_back(std::move(picks));
  }

  const size_t history_begin =
      example.history.size() > kMaxHistory ? example.history.size() - kMaxHistory
                                           : 0;
  const std::vector<int> history(example.history.begin() + history_begin,
                                 example.history.end());
  const Matrix clicked = nn::GatherRows(news_reps, history);

  nn::SelfAttentionCache attention_cache;
  FEDREC_ASSIGN_OR_RETURN(
      const Matrix contextual,
      nn::SelfAttention(clicked, params.self_attention, &attention_cache));
  const Matrix dropout_mask =
      nn::DropoutMask(static_cast<int>(contextual.rows()),
                      static_cast<int>(contextual.cols()), options.dropout, rng);
  const Matrix dropped = contextual.cwiseProduct(dropout_mask);

  // Cluster assignment is a discrete choice and is held fixed for gradients.
  FEDREC_ASSIGN_OR_RETURN(
      const cluster::ClusterAssignment clusters,
      cluster::ClusterAverageLinkage(contextual, config.cluster_distance));
  const double noise =
      options.inject_noise ? config.ldp.noise : 0.0;
  const double clip = config.ldp.clip;

  std::vector<ChannelState> channels(clusters.size());
  Vector query = Vector::Zero(params.bie.dim());  // sum_i q_i r_hat_i
  for (int c = 0; c < clusters.size(); ++c) {
    ChannelState& ch = channels[c];
    ch.rows = clusters.clusters[c];
    ch.ratio = static_cast<double>(ch.rows.size()) / history.size();
    FEDREC_ASSIGN_OR_RETURN(
        const nn::AttentionPoolResult pooled,
        nn::AttentionPool(nn::GatherRows(dropped, ch.rows),
                          params.cluster_attention, &ch.pool_cache));
    ch.interest = pooled.pooled;
    ch.scores = params.bie.keys * ch.interest;
    Vector perturbed(ch.scores.size());
    for (Eigen::Index j = 0; j < ch.scores.size(); ++j) {
      perturbed(j) = std::clamp(ch.scores(j), -clip, clip) + rng.Laplace(noise);
    }
    ch.alpha = nn::Softmax(perturbed);
    ch.protected_rep = params.bie.values.transpose() * ch.alpha;
    query += ch.ratio * ch.protected_rep;
  }

  // InfoNCE over unified scores; every score is news . query.
  const double inv_positives = 1.0 / example.positives.size();
  double loss = 0;
  Vector d_query = Vector::Zero(query.size());
  for (size_t p = 0; p < example.positives.size(); ++p) {
    std::vector<int> items;
    items.reserve(k + 1);
    items.push_back(example.positives[p]);
    items.insert(items.end(), negatives[p].begin(), negatives[p].end());
    Vector logits(items.size());
    for (size_t i = 0; i < items.size(); ++i) {
      logits(i) = news_reps.row(items[i]).dot(query);
    }
    const double max = logits.maxCoeff();
    const double log_norm = max + std::log((logits.array() - max).exp().sum());
    loss += (log_norm - logits(0)) * inv_positives;
    if (grads != nullptr) {
      const Vector probs = (logits.array() - log_norm).exp();
      for (size_t i = 0; i < items.size(); ++i) {
        const double coeff = probs(i) - (i == 0 ? 1.0 : 0.0);
        d_query += (coeff * inv_positives) * news_reps.row(items[i]).transpose();
      }
    }
  }
  if (!std::isfinite(loss)) return absl::AbortedError("non-finite recall loss");
  if (grads == nullptr) return loss;

  d_query *= grad_scale;
  Matrix d_dropped = Matrix::Zero(dropped.rows(), dropped.cols());
  for (ChannelState& ch : channels) {
    const Vector d_protected = ch.ratio * d_query;
    grads->bie.values += ch.alpha * d_protected.transpose();
    const Vector d_alpha = params.bie.values * d_protected;
    Vector d_scores =
        ch.alpha.array() * (d_alpha.array() - ch.alpha.dot(d_alpha));
    for (Eigen::Index j = 0; j < d_scores.size(); ++j) {
      if (std::abs(ch.scores(j)) >= clip) d_scores(j) = 0;
    }
    grads->bie.keys += d_scores * ch.interest.transpose();
    const Vector d_interest = params.bie.keys.transpose() * d_scores;
    Matrix d_rows;
    nn::AttentionPoolBackward(ch.pool_cache, params.cluster_attention,
                              d_interest, &d_rows, grads->cluster_attention);
    for (size_t r = 0; r < ch.rows.size(); ++r) {
      d_dropped.row(ch.rows[r]) += d_rows.row(r);
    }
  }
  const Matrix d_contextual = d_dropped.cwiseProduct(dropout_mask);
  nn::SelfAttentionBackward(attention_cache, params.self_attention,
                            d_contextual, nullptr, grads->self_attention);
  return loss;
}

}  // namespace fedrec::recall
