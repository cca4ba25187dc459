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

// Multi-interest recall with a privacy-preserving query.
//
// Client side: clicked-news representations are contextualized by a
// self-attention network, grouped by average-linkage clustering, and pooled
// per cluster into interest representations. Each interest is decomposed onto
// the keys of a shared bank of basic interest embeddings (BIE); the
// decomposition scores are clipped and perturbed with Laplace noise, and only
// their softmax (alpha) plus per-channel quotas leave the device.
//
// Server side: alpha re-synthesizes a protected interest from the BIE values;
// each channel recalls its quota of news by inner product, and channel lists
// are merged into one candidate set.

#ifndef FEDREC_RECALL_RECALL_MODEL_H_
#define FEDREC_RECALL_RECALL_MODEL_H_

#include <string>
#include <vector>

#include "absl/status/statusor.h"
#include "absl/types/span.h"
#include "fedrec/base/random.h"
#include "fedrec/cluster/clustering.h"
#include "fedrec/nn/attention.h"
#include "fedrec/nn/tensor.h"

namespace fedrec::recall {

using nn::Matrix;
using nn::Vector;

inline constexpr int kMaxHistory = 50;

struct LdpConfig {
  double clip = 0.2;   // delta
  double noise = 1.2;  // lambda_I; 0 disables perturbation
};

struct RecallConfig {
  int dim = 32;
  int heads = 4;
  int head_dim = 8;
  int attention_hidden = 128;
  int num_bie = 8;
  double cluster_distance = 1.0;
  LdpConfig ldp;
  int negatives = 4;  // K_r
  double dropout = 0.2;
  // Whether Laplace noise is injected into the decomposition scores while
  // computing training losses.
  bool train_noise = true;
  double init_limit = 0.1;
  double identity_init = 1.0;

  absl::Status Validate() const;
};

// Basic interest embeddings: B key/value pairs.
struct BieBank {
  Matrix keys;    // B x d
  Matrix values;  // B x d

  int size() const { return static_cast<int>(keys.rows()); }
  int dim() const { return static_cast<int>(keys.cols()); }
};

struct RecallParams {
  nn::SelfAttentionParams self_attention;
  nn::AttentionPoolParams cluster_attention;
  BieBank bie;

  static RecallParams Zeros(const RecallConfig& config);
  static RecallParams Initialize(const RecallConfig& config, Rng& rng);
  nn::ParamList Params();
};

struct InterestChannels {
  Matrix reps;  // C x d, r_i
  std::vector<int> cluster_sizes;
  cluster::ClusterAssignment clusters;

  int size() const { return static_cast<int>(reps.rows()); }
};

// Self-attention, clustering at `cluster_distance`, and per-cluster attention
// pooling over 1..50 clicked-news representations.
absl::StatusOr<InterestChannels> EncodeInterestChannels(
    const Matrix& clicked_reps, const RecallParams& params,
    double cluster_distance);

// a_j = r . key_j.
absl::StatusOr<Vector> DecomposeInterest(const Vector& interest,
                                         const BieBank& bank);

// clip(a_j, -delta, delta) + Laplace(0, lambda_I), independently per entry.
Vector PerturbScores(const Vector& scores, const LdpConfig& config, Rng& rng);

struct AggregatedInterest {
  Vector rep;    // r_hat
  Vector alpha;  // softmax of the protected scores
};

absl::StatusOr<AggregatedInterest> AggregateInterest(const Vector& scores,
                                                     const BieBank& bank);

// Protected representations for every row of `alpha` (C x B): alpha * values.
absl::StatusOr<Matrix> SynthesizeInterests(const Matrix& alpha,
                                           const BieBank& bank);

struct QuotaAllocation {
  std::vector<int> quotas;
  std::vector<double> ratios;
};

// Ratios proportional to cluster sizes; integer quotas by largest remainder so
// they sum to `total` exactly. Remainder ties go to the larger cluster, then
// the lower channel index.
absl::StatusOr<QuotaAllocation> AllocateQuotas(absl::Span<const int> sizes,
                                               int total);

// Exact top-k news indices by inner product with `rep`, descending, ties to
// the lower index. `exclude` must be sorted ascending.
absl::StatusOr<std::vector<int>> RecallChannel(const Vector& rep,
                                               const Matrix& news_reps, int k,
                                               absl::Span<const int> exclude);

// z = sum_i ratio_i (news . protected_i).
double UnifiedScore(const Vector& news_rep, const Matrix& protected_reps,
                    absl::Span<const double> ratios);

// Concatenates channel lists (each truncated to its quota), drops repeats
// keeping the first occurrence, and backfills by unified score until
// min(total, available) candidates are present.
std::vector<int> MergeChannels(const std::vector<std::vector<int>>& lists,
                               absl::Span<const int> quotas,
                               const Matrix& protected_reps,
                               absl::Span<const double> ratios,
                               const Matrix& news_reps, int total,
                               absl::Span<const int> exclude);

// What the client uploads: perturbed decomposition weights and quotas. The
// ratios stay on the device and are kept here for local scoring.
struct ProtectedQuery {
  Matrix alpha;  // C x B
  std::vector<int> quotas;
  std::vector<double> ratios;
};

// Runs the whole client side for one user. `noise_rng` may be null only when
// config.ldp.noise == 0.
absl::StatusOr<ProtectedQuery> BuildProtectedQuery(
    const Matrix& clicked_reps, const RecallParams& params,
    const RecallConfig& config, int total, Rng* noise_rng);

// Query used for users without history: one channel, uniform alpha.
ProtectedQuery ColdStartQuery(int num_bie, int total);

// Server side: synthesize per-channel interests, recall per quota, merge.
absl::StatusOr<std::vector<int>> RecallCandidates(
    const ProtectedQuery& query, const BieBank& bank, const Matrix& news_reps,
    absl::Span<const int> exclude = {});

// Single-vector baseline: the mean of clicked-news representations, used
// directly (no BIE, no perturbation) to recall the top `total` news.
absl::StatusOr<std::vector<int>> MeanPoolRecall(const Matrix& clicked_reps,
                                                const Matrix& news_reps,
                                                int total,
                                                absl::Span<const int> exclude =
                                                    {});

// ---------------------------------------------------------------------------
// Training loss.

// One user's recall-training data, as row indices into the news matrix.
struct RecallExample {
  std::vector<int> history;        // most recent last, <= 50
  std::vector<int> positives;      // clicked news to score
  std::vector<int> negative_pool;  // displayed but never clicked
};

struct RecallLossOptions {
  bool inject_noise = true;
  double dropout = 0.0;
  int negatives = 4;
};

// Mean over positives of -log softmax(z_pos, z_neg_1..K) with z from
// UnifiedScore over the protected pipeline. Negatives are drawn from the
// example's negative pool without replacement, per positive. When `grads` is
// non-null the parameter gradient is accumulated into it (scaled by
// `grad_scale`). All randomness (negatives, noise, dropout) comes from `rng`
// in a fixed order, so a fixed seed gives a deterministic function of params.
absl::StatusOr<double> RecallLoss(const RecallExample& example,
                                  const Matrix& news_reps,
                                  const RecallParams& params,
                                  const RecallConfig& config,
                                  const RecallLossOptions& options, Rng& rng,
                                  RecallParams* grads,
                                  double grad_scale = 1.0);

}  // namespace fedrec::recall

#endif  // FEDREC_RECALL_RECALL_MODEL_H_
