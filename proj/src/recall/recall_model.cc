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

#include "fedrec/recall/recall_model.h"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "absl/strings/str_cat.h"
#include "fedrec/base/status_macros.h"

namespace fedrec::recall {

absl::Status RecallConfig::Validate() const {
  if (dim <= 0 || heads <= 0 || head_dim <= 0 || attention_hidden <= 0 ||
      num_bie <= 0) {
    return absl::InvalidArgumentError("recall dimensions must be positive");
  }
  if (heads * head_dim != dim) {
    return absl::InvalidArgumentError(absl::StrCat(
        "heads * head_dim (", heads * head_dim, ") must equal dim (", dim,
        ")"));
  }
  if (!(ldp.clip > 0)) return absl::InvalidArgumentError("clip must be > 0");
  if (!(ldp.noise >= 0)) {
    return absl::InvalidArgumentError("interest noise must be >= 0");
  }
  if (!(cluster_distance >= 0)) {
    return absl::InvalidArgumentError("cluster distance must be >= 0");
  }
  if (negatives < 0) return absl::InvalidArgumentError("negatives must be >= 0");
  if (!(dropout >= 0 && dropout < 1)) {
    return absl::InvalidArgumentError("dropout must be in [0, 1)");
  }
  return absl::OkStatus();
}

RecallParams RecallParams::Zeros(const RecallConfig& config) {
  RecallParams p;
  p.self_attention =
      nn::SelfAttentionParams::Zeros(config.dim, config.heads, config.head_dim);
  p.cluster_attention =
      nn::AttentionPoolParams::Zeros(config.dim, config.attention_hidden);
  p.bie.keys = Matrix::Zero(config.num_bie, config.dim);
  p.bie.values = Matrix::Zero(config.num_bie, config.dim);
  return p;
}

RecallParams RecallParams::Initialize(const RecallConfig& config, Rng& rng) {
  RecallParams p = Zeros(config);
  nn::FillUniform(p.Params(), config.init_limit, rng);
  p.self_attention.AddIdentity(config.identity_init);
  return p;
}

nn::ParamList RecallParams::Params() {
  nn::ParamList out;
  self_attention.AppendTo("recall/self_attention", out);
  cluster_attention.AppendTo("recall/cluster_attention", out);
  nn::AppendMatrix("recall/bie/keys", bie.keys, out);
  nn::AppendMatrix("recall/bie/values", bie.values, out);
  return out;
}

absl::StatusOr<InterestChannels> EncodeInterestChannels(
    const Matrix& clicked_reps, const RecallParams& params,
    double cluster_distance) {
  if (clicked_reps.rows() == 0) return absl::InvalidArgumentError("cold user");
  if (clicked_reps.rows() > kMaxHistory) {
    return absl::InvalidArgumentError(
        absl::StrCat("history of ", clicked_reps.rows(),
                     " clicks exceeds the cap of ", kMaxHistory));
  }
  FEDREC_ASSIGN_OR_RETURN(const Matrix contextual,
                          nn::SelfAttention(clicked_reps, params.self_attention));
  InterestChannels channels;
  FEDREC_ASSIGN_OR_RETURN(
      channels.clusters,
      cluster::ClusterAverageLinkage(contextual, cluster_distance));
  channels.cluster_sizes = channels.clusters.Sizes();
  channels.reps.resize(channels.clusters.size(), contextual.cols());
  for (int c = 0; c < channels.clusters.size(); ++c) {
    const Matrix rows = nn::GatherRows(contextual, channels.clusters.clusters[c]);
    FEDREC_ASSIGN_OR_RETURN(const nn::AttentionPoolResult pooled,
                            nn::AttentionPool(rows, params.cluster_attention));
    channels.reps.row(c) = pooled.pooled.transpose();
  }
  return channels;
}

absl::StatusOr<Vector> DecomposeInterest(const Vector& interest,
                                         const BieBank& bank) {
  if (interest.size() != bank.keys.cols()) {
    return absl::InvalidArgumentError(
        absl::StrCat("interest has dim ", interest.size(), ", BIE keys have ",
                     bank.keys.cols()));
  }
  return Vector(bank.keys * interest);
}

Vector PerturbScores(const Vector& scores, const LdpConfig& config, Rng& rng) {
  Vector out(scores.size());
  for (Eigen::Index j = 0; j < scores.size(); ++j) {
    out(j) = std::clamp(scores(j), -config.clip, config.clip) +
             rng.Laplace(config.noise);
  }
  return out;
}

absl::StatusOr<AggregatedInterest> AggregateInterest(const Vector& scores,
                                                     const BieBank& bank) {
  if (scores.size() != bank.values.rows()) {
    return absl::InvalidArgumentError(
        absl::StrCat("got ", scores.size(), " scores for a bank of ",
                     bank.values.rows()));
  }
  AggregatedInterest out;
  out.alpha = nn::Softmax(scores);
  out.rep = bank.values.transpose() * out.alpha;
  return out;
}

absl::StatusOr<Matrix> SynthesizeInterests(const Matrix& alpha,
                                           const BieBank& bank) {
  if (alpha.cols() != bank.values.rows()) {
    return absl::InvalidArgumentError(
        absl::StrCat("alpha has ", alpha.cols(), " columns for a bank of ",
                     bank.values.rows()));
  }
  return Matrix(alpha * bank.values);
}

absl::StatusOr<QuotaAllocation> AllocateQuotas(absl::Span<const int> sizes,
                                               int total) {
  if (total < 0) return absl::InvalidArgumentError("total recall count < 0");
  int64_t sum = 0;
  for (int s : sizes) {
    if (s < 0) return absl::InvalidArgumentError("negative cluster size");
    sum += s;
  }
  if (sum == 0) {
    return absl::InvalidArgumentError("all clusters are empty");
  }
  QuotaAllocation out;
  const int c = static_cast<int>(sizes.size());
  out.quotas.resize(c);
  out.ratios.resize(c);
  std::vector<int64_t> remainder(c);
  int64_t assigned = 0;
  for (int i = 0; i < c; ++i) {
    out.ratios[i] = static_cast<double>(sizes[i]) / static_cast<double>(sum);
    const int64_t scaled = static_cast<int64_t>(sizes[i]) * total;
    out.quotas[i] = static_cast<int>(scaled / sum);
    remainder[i] = scaled % sum;
    assigned += out.quotas[i];
  }
  std::vector<int> order(c);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
    if (remainder[a] != remainder[b]) return remainder[a] > remainder[b];
    if (sizes[a] != sizes[b]) return sizes[a] > sizes[b];
    return a < b;
  });
  for (int64_t left = total - assigned, i = 0; left > 0; --left, ++i) {
    ++out.quotas[order[i]];
  }
  return out;
}

namespace {

// Indices of all news not in `exclude`, ordered by descending score with ties
// to the lower index; only the first `k` are guaranteed sorted.
std::vector<int> TopByScore(const Vector& scores, int k,
                            absl::Span<const int> exclude) {
  std::vector<int> ids;
  ids.reserve(scores.size());
  size_t e = 0;
  for (int i = 0; i < scores.size(); ++i) {
    while (e < exclude.size() && exclude[e] < i) ++e;
    if (e < exclude.size() && exclude[e] == i) continue;
    ids.push_back(i);
  }
  k = std::min<int>(k, ids.size());
  std::partial_sort(ids.begin(), ids.begin() + k, ids.end(), [&](int a, int b) {
    if (scores(a) != scores(b)) return scores(a) > scores(b);
    return a < b;
  });
  ids.resize(k);
  return ids;
}

int CountExcluded(absl::Span<const int> exclude, int n) {
  return static_cast<int>(std::count_if(exclude.begin(), exclude.end(),
                                        [n](int i) { return i >= 0 && i < n; }));
}

}  // namespace

absl::StatusOr<std::vector<int>> RecallChannel(const Vector& rep,
                                               const Matrix& news_reps, int k,
                                               absl::Span<const int> exclude) {
  if (rep.size() != news_reps.cols()) {
    return absl::InvalidArgumentError(
        absl::StrCat("interest dim ", rep.size(), " != news dim ",
                     news_reps.cols()));
  }
  if (!std::is_sorted(exclude.begin(), exclude.end())) {
    return absl::InvalidArgumentError("exclude list must be sorted");
  }
  const int n = static_cast<int>(news_reps.rows());
  const int available = n - CountExcluded(exclude, n);
  if (k < 0 || k > available) {
    return absl::InvalidArgumentError(absl::StrCat(
        "cannot recall ", k, " news from ", available, " available"));
  }
  const Vector scores = news_reps * rep;
  return TopByScore(scores, k, exclude);
}

double UnifiedScore(const Vector& news_rep, const Matrix& protected_reps,
                    absl::Span<const double> ratios) {
  double z = 0;
  for (Eigen::Index i = 0; i < protected_reps.rows(); ++i) {
    z += ratios[i] * protected_reps.row(i).dot(news_rep);
  }
  return z;
}

std::vector<int> MergeChannels(const std::vector<std::vector<int>>& lists,
                               absl::Span<const int> quotas,
                               const Matrix& protected_reps,
                               absl::Span<const double> ratios,
                               const Matrix& news_reps, int total,
                               absl::Span<const int> exclude) {
  const int n = static_cast<int>(news_reps.rows());
  const int target = std::max(0, std::min(total, n - CountExcluded(exclude, n)));
  std::vector<char> taken(n, 0);
  std::vector<int> merged;
  merged.reserve(target);
  for (size_t c = 0; c < lists.size(); ++c) {
    const size_t limit = std::min<size_t>(lists[c].size(), quotas[c]);
    for (size_t j = 0; j < limit && static_cast<int>(merged.size()) < target;
         ++j) {
      const int id = lists[c][j];
      if (taken[id]) continue;
      taken[id] = 1;
      merged.push_back(id);
    }
  }
  if (static_cast<int>(merged.size()) < target) {
    Vector unified = Vector::Zero(n);
    for (Eigen::Index i = 0; i < protected_reps.rows(); ++i) {
      unified += ratios[i] * (news_reps * protected_reps.row(i).transpose());
    }
    for (int id : TopByScore(unified, n, exclude)) {
      if (static_cast<int>(merged.size()) >= target) break;
      if (taken[id]) continue;
      taken[id] = 1;
      merged.push_back(id);
    }
  }
  return merged;
}

absl::StatusOr<ProtectedQuery> BuildProtectedQuery(
    const Matrix& clicked_reps, const RecallParams& params,
    const RecallConfig& config, int total, Rng* noise_rng) {
  if (config.ldp.noise > 0 && noise_rng == nullptr) {
    return absl::InvalidArgumentError("noise enabled but no random source");
  }
  FEDREC_ASSIGN_OR_RETURN(
      const InterestChannels channels,
      EncodeInterestChannels(clicked_reps, params, config.cluster_distance));
  ProtectedQuery query;
  query.alpha.resize(channels.size(), params.bie.size());
  Rng unused(0);
  for (int c = 0; c < channels.size(); ++c) {
    FEDREC_ASSIGN_OR_RETURN(
        const Vector scores,
        DecomposeInterest(channels.reps.row(c).transpose(), params.bie));
    const Vector perturbed = PerturbScores(
        scores, config.ldp, noise_rng != nullptr ? *noise_rng : unused);
    query.alpha.row(c) = nn::Softmax(perturbed).transpose();
  }
  FEDREC_ASSIGN_OR_RETURN(QuotaAllocation quotas,
                          AllocateQuotas(channels.cluster_sizes, total));
  query.quotas = std::move(quotas.quotas);
  query.ratios = std::move(quotas.ratios);
  return query;
}

ProtectedQuery ColdStartQuery(int num_bie, int total) {
  ProtectedQuery query;
  query.alpha = Matrix::Constant(1, num_bie, 1.0 / num_bie);
  query.quotas = {total};
  query.ratios = {1.0};
  return query;
}

absl::StatusOr<std::vector<int>> RecallCandidates(
    const ProtectedQuery& query, const BieBank& bank, const Matrix& news_reps,
    absl::Span<const int> exclude) {
  if (query.quotas.size() != static_cast<size_t>(query.alpha.rows())) {
    return absl::InvalidArgumentError("one quota per channel is required");
  }
  FEDREC_ASSIGN_OR_RETURN(const Matrix reps,
                          SynthesizeInterests(query.alpha, bank));
  const int n = static_cast<int>(news_reps.rows());
  const int available = n - CountExcluded(exclude, n);
  std::vector<std::vector<int>> lists;
  int total = 0;
  for (Eigen::Index c = 0; c < reps.rows(); ++c) {
    const int k = std::min(query.quotas[c], available);
    FEDREC_ASSIGN_OR_RETURN(
        std::vector<int> list,
        RecallChannel(reps.row(c).transpose(), news_reps, k, exclude));
    lists.push_back(std::move(list));
    total += query.quotas[c];
  }
  // The server only sees quotas, so their shares stand in for the cluster
  // ratios when backfilling.
  std::vector<double> ratios(query.quotas.size());
  for (size_t c = 0; c < ratios.size(); ++c) {
    ratios[c] = total > 0 ? static_cast<double>(query.quotas[c]) / total
                          : 1.0 / ratios.size();
  }
  return MergeChannels(lists, query.quotas, reps, ratios, news_reps, total,
                       exclude);
}

absl::StatusOr<std::vector<int>> MeanPoolRecall(const Matrix& clicked_reps,
                                                const Matrix& news_reps,
                                                int total,
                                                absl::Span<const int> exclude) {
  if (clicked_reps.rows() == 0) return absl::InvalidArgumentError("cold user");
  const Vector mean = clicked_reps.colwise().mean().transpose();
  const int n = static_cast<int>(news_reps.rows());
  return RecallChannel(mean, news_reps,
                       std::min(total, n - CountExcluded(exclude, n)), exclude);
}

}  // namespace fedrec::recall
