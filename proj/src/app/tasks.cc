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

#include "fedrec/app/tasks.h"

#include <algorithm>

#include "absl/strings/str_cat.h"
#include "fedrec/base/random.h"
#include "fedrec/base/status_macros.h"
#include "fedrec/data/synthetic.h"
#include "fedrec/serving/protocol.h"

namespace fedrec::app {
namespace {

// Init streams of the two models.
constexpr uint64_t kRecallInit = 1;
constexpr uint64_t kRankingInit = 2;

std::vector<double> FlattenParams(recall::RecallParams& params) {
  return nn::Flatten(params.Params());
}

std::vector<double> FlattenParams(ranking::RankingParams& params) {
  return nn::Flatten(params.Params());
}

}  // namespace

RecallTask::RecallTask(const nn::Matrix* news_reps,
                       std::vector<recall::RecallExample> examples,
                       recall::RecallConfig config)
    : news_reps_(news_reps),
      examples_(std::move(examples)),
      config_(std::move(config)) {
  num_params_ = nn::TotalSize(recall::RecallParams::Zeros(config_).Params());
}

absl::StatusOr<federated::ClientResult> RecallTask::ComputeClient(
    int client, absl::Span<const double> params, uint64_t seed,
    bool with_grads) const {
  recall::RecallParams model = recall::RecallParams::Zeros(config_);
  FEDREC_RETURN_IF_ERROR(nn::Unflatten(params, model.Params()));
  recall::RecallParams grads = recall::RecallParams::Zeros(config_);
  recall::RecallLossOptions options;
  options.inject_noise = config_.train_noise;
  options.dropout = config_.dropout;
  options.negatives = config_.negatives;
  Rng rng(seed);
  const recall::RecallExample& example = examples_[client];
  federated::ClientResult result;
  FEDREC_ASSIGN_OR_RETURN(
      result.loss, recall::RecallLoss(example, *news_reps_, model, config_,
                                      options, rng,
                                      with_grads ? &grads : nullptr));
  result.weight = static_cast<double>(example.positives.size());
  if (with_grads) result.grads = FlattenParams(grads);
  return result;
}

RankingTask::RankingTask(const std::vector<std::vector<int>>* titles,
                         int vocab_size,
                         std::vector<ranking::RankingExample> examples,
                         ranking::RankingConfig config)
    : titles_(titles),
      vocab_size_(vocab_size),
      examples_(std::move(examples)),
      config_(std::move(config)) {
  num_params_ = nn::TotalSize(
      ranking::RankingParams::Zeros(config_, vocab_size_).Params());
}

absl::StatusOr<federated::ClientResult> RankingTask::ComputeClient(
    int client, absl::Span<const double> params, uint64_t seed,
    bool with_grads) const {
  ranking::RankingParams model =
      ranking::RankingParams::Zeros(config_, vocab_size_);
  FEDREC_RETURN_IF_ERROR(nn::Unflatten(params, model.Params()));
  ranking::RankingParams grads =
      ranking::RankingParams::Zeros(config_, vocab_size_);
  ranking::RankingLossOptions options;
  options.dropout = config_.dropout;
  options.negatives = config_.negatives;
  Rng rng(seed);
  FEDREC_ASSIGN_OR_RETURN(
      const ranking::RankingLossResult loss,
      ranking::RankingLoss(examples_[client], *titles_, model, options, rng,
                           with_grads ? &grads : nullptr));
  if (loss.positives == 0) {
    return absl::InternalError(
        absl::StrCat("ranking client ", client, " has no usable behaviors"));
  }
  federated::ClientResult result;
  result.loss = loss.loss;
  result.weight = loss.positives;
  if (with_grads) result.grads = FlattenParams(grads);
  return result;
}

RecallClients SelectRecallClients(const data::Corpus& corpus, int negatives) {
  RecallClients out;
  for (size_t u = 0; u < corpus.users.size(); ++u) {
    recall::RecallExample example = data::MakeRecallExample(corpus.users[u]);
    if (example.history.empty() || example.positives.empty() ||
        example.negative_pool.size() < static_cast<size_t>(negatives)) {
      ++out.skipped;
      continue;
    }
    out.users.push_back(static_cast<int>(u));
    out.examples.push_back(std::move(example));
  }
  return out;
}

RankingClients SelectRankingClients(const data::Corpus& corpus,
                                    int negatives) {
  RankingClients out;
  for (size_t u = 0; u < corpus.users.size(); ++u) {
    ranking::RankingExample example = data::MakeRankingExample(corpus.users[u]);
    const bool usable = std::any_of(
        example.impressions.begin(), example.impressions.end(),
        [&](const ranking::RankingImpression& imp) {
          return !imp.clicked.empty() &&
                 imp.unclicked.size() >= static_cast<size_t>(negatives);
        });
    if (example.history.empty() || !usable) {
      ++out.skipped;
      continue;
    }
    out.users.push_back(static_cast<int>(u));
    out.examples.push_back(std::move(example));
  }
  return out;
}

recall::RecallParams InitialRecallParams(const RunConfig& config) {
  Rng rng(DeriveSeed(config.seed, {Tag(StreamTag::kInit), kRecallInit}));
  return recall::RecallParams::Initialize(config.model.recall, rng);
}

ranking::RankingParams InitialRankingParams(const RunConfig& config,
                                            int vocab_size) {
  Rng rng(DeriveSeed(config.seed, {Tag(StreamTag::kInit), kRankingInit}));
  return ranking::RankingParams::Initialize(config.model.ranking, vocab_size,
                                            rng);
}

absl::StatusOr<TrainedRecall> TrainRecall(
    const data::Corpus& corpus, const nn::Matrix& news_reps,
    const RunConfig& config, const federated::RoundCallback& on_round) {
  FEDREC_RETURN_IF_ERROR(config.model.recall.Validate());
  if (news_reps.rows() != corpus.num_news() ||
      news_reps.cols() != config.model.recall.dim) {
    return absl::InvalidArgumentError(absl::StrCat(
        "news vectors are ", news_reps.rows(), "x", news_reps.cols(),
        ", expected ", corpus.num_news(), "x", config.model.recall.dim));
  }
  RecallClients clients =
      SelectRecallClients(corpus, config.model.recall.negatives);
  if (clients.examples.empty()) {
    return absl::FailedPreconditionError("no user has usable recall data");
  }
  TrainedRecall out;
  out.clients = static_cast<int>(clients.examples.size());
  out.skipped = clients.skipped;
  out.params = InitialRecallParams(config);
  RecallTask task(&news_reps, std::move(clients.examples),
                  config.model.recall);
  federated::FedConfig fed = config.federated;
  fed.seed = config.seed;
  FEDREC_ASSIGN_OR_RETURN(
      out.result, federated::TrainFederated(task, FlattenParams(out.params),
                                            fed, on_round));
  FEDREC_RETURN_IF_ERROR(nn::Unflatten(out.result.params, out.params.Params()));
  return out;
}

absl::StatusOr<TrainedRanking> TrainRanking(
    const data::Corpus& corpus, const RunConfig& config,
    const federated::RoundCallback& on_round) {
  FEDREC_RETURN_IF_ERROR(config.model.ranking.Validate());
  RankingClients clients =
      SelectRankingClients(corpus, config.model.ranking.negatives);
  if (clients.examples.empty()) {
    return absl::FailedPreconditionError("no user has usable ranking data");
  }
  const int vocab_size = corpus.vocab.size();
  TrainedRanking out;
  out.clients = static_cast<int>(clients.examples.size());
  out.skipped = clients.skipped;
  out.params = InitialRankingParams(config, vocab_size);
  RankingTask task(&corpus.titles, vocab_size, std::move(clients.examples),
                   config.model.ranking);
  federated::FedConfig fed = config.federated;
  fed.seed = config.seed;
  FEDREC_ASSIGN_OR_RETURN(
      out.result, federated::TrainFederated(task, FlattenParams(out.params),
                                            fed, on_round));
  FEDREC_RETURN_IF_ERROR(nn::Unflatten(out.result.params, out.params.Params()));
  return out;
}

absl::StatusOr<nn::Matrix> RecallNewsReps(
    const data::Corpus& corpus, const RunConfig& config,
    const ranking::RankingParams* ranking,
    const std::filesystem::path& dataset_dir) {
  nn::Matrix reps;
  if (config.model.news_reps == "planted") {
    FEDREC_ASSIGN_OR_RETURN(const data::SyntheticTruth truth,
                            data::ReadSyntheticTruth(dataset_dir));
    reps.setZero(corpus.num_news(), truth.news_vectors.cols());
    std::vector<bool> seen(corpus.num_news(), false);
    for (size_t i = 0; i < truth.news_ids.size(); ++i) {
      auto it = corpus.news_index.find(truth.news_ids[i]);
      if (it == corpus.news_index.end()) continue;
      reps.row(it->second) = truth.news_vectors.row(i);
      seen[it->second] = true;
    }
    if (std::find(seen.begin(), seen.end(), false) != seen.end()) {
      return absl::InvalidArgumentError(
          "planted vectors do not cover every news item");
    }
  } else {
    if (ranking == nullptr) {
      return absl::FailedPreconditionError(
          "recall on encoder outputs needs a ranking checkpoint; train one "
          "with train-rank and pass --ranking-checkpoint, or set "
          "model.news_reps=planted for synthetic data");
    }
    FEDREC_ASSIGN_OR_RETURN(reps,
                            ranking::EncodeNewsBatch(corpus.titles, *ranking));
  }
  if (reps.cols() != config.model.recall.dim) {
    return absl::InvalidArgumentError(absl::StrCat(
        "news vectors have dimension ", reps.cols(), " but model.dim is ",
        config.model.recall.dim));
  }
  return reps;
}

nn::Matrix HistoryReps(const std::vector<int>& history,
                       const nn::Matrix& news_reps) {
  return nn::GatherRows(news_reps, history);
}

absl::StatusOr<RecallEvaluation> EvaluateRecall(
    const data::Corpus& corpus, const nn::Matrix& news_reps,
    const recall::RecallParams& params, const recall::RecallConfig& config,
    absl::Span<const int> ks, uint64_t seed, bool baseline) {
  RecallEvaluation out;
  out.ks.assign(ks.begin(), ks.end());
  const size_t num_k = ks.size();
  // Per K, per evaluated user.
  std::vector<std::vector<std::vector<int>>> recalled(num_k);
  std::vector<std::vector<std::vector<int>>> pooled(num_k);
  std::vector<std::vector<int>> targets;
  std::vector<std::vector<int>> histories;
  std::vector<std::vector<int>> warm_targets;
  std::vector<std::vector<int>> warm_histories;
  for (size_t u = 0; u < corpus.users.size(); ++u) {
    const data::UserRecord& user = corpus.users[u];
    std::vector<int> future = user.EvalClicks();
    if (future.empty()) continue;
    ++out.users;
    const std::vector<int>& history = user.eval_history;
    const nn::Matrix clicked = HistoryReps(history, news_reps);
    const bool cold = history.empty();
    if (cold) ++out.cold_users;
    for (size_t i = 0; i < num_k; ++i) {
      recall::ProtectedQuery query;
      if (cold) {
        query = recall::ColdStartQuery(config.num_bie, ks[i]);
      } else {
        // The same stream for every K, so every K sees the same weights.
        Rng rng(DeriveSeed(seed, {Tag(StreamTag::kEval), u}));
        FEDREC_ASSIGN_OR_RETURN(
            query, recall::BuildProtectedQuery(clicked, params, config, ks[i],
                                               &rng));
      }
      query.alpha = serving::CanonicalWeights(query.alpha);
      FEDREC_ASSIGN_OR_RETURN(
          std::vector<int> list,
          recall::RecallCandidates(query, params.bie, news_reps));
      recalled[i].push_back(std::move(list));
      if (baseline && !cold) {
        FEDREC_ASSIGN_OR_RETURN(
            std::vector<int> mean,
            recall::MeanPoolRecall(clicked, news_reps, ks[i]));
        pooled[i].push_back(std::move(mean));
      }
    }
    if (baseline && !cold) {
      warm_targets.push_back(future);
      warm_histories.push_back(history);
    }
    targets.push_back(std::move(future));
    histories.push_back(history);
  }
  for (size_t i = 0; i < num_k; ++i) {
    out.future.push_back(
        metrics::RecallAtK(targets, recalled[i], ks[i]).percent);
    out.history.push_back(
        metrics::HistoryRecallRate(histories, recalled[i], ks[i]).percent);
    if (baseline) {
      out.baseline_future.push_back(
          metrics::RecallAtK(warm_targets, pooled[i], ks[i]).percent);
      out.baseline_history.push_back(
          metrics::HistoryRecallRate(warm_histories, pooled[i], ks[i])
              .percent);
    }
  }
  return out;
}

absl::StatusOr<RankingEvaluation> EvaluateRanking(
    const data::Corpus& corpus, const ranking::RankingParams& ranking,
    const recall::RecallParams* recall_params,
    const recall::RecallConfig& recall_config,
    const nn::Matrix* recall_news_reps, int recall_total, uint64_t seed,
    metrics::TiePolicy ties) {
  FEDREC_ASSIGN_OR_RETURN(const nn::Matrix reps,
                          ranking::EncodeNewsBatch(corpus.titles, ranking));
  std::vector<metrics::ScoredImpression> impressions;
  std::vector<metrics::ScoredImpression> recalled;
  for (size_t u = 0; u < corpus.users.size(); ++u) {
    const data::UserRecord& user = corpus.users[u];
    if (user.eval.empty()) continue;
    nn::Vector user_vec = nn::Vector::Zero(reps.cols());
    if (!user.eval_history.empty()) {
      FEDREC_ASSIGN_OR_RETURN(
          user_vec,
          ranking::EncodeUser(HistoryReps(user.eval_history, reps), ranking));
    }
    for (const data::IndexedImpression& imp : user.eval) {
      metrics::ScoredImpression scored;
      for (int n : imp.clicked) {
        scored.scores.push_back(reps.row(n).dot(user_vec));
        scored.labels.push_back(1);
      }
      for (int n : imp.unclicked) {
        scored.scores.push_back(reps.row(n).dot(user_vec));
        scored.labels.push_back(0);
      }
      impressions.push_back(std::move(scored));
    }
    if (recall_params == nullptr) continue;
    const std::vector<int> future = user.EvalClicks();
    recall::ProtectedQuery query;
    if (user.eval_history.empty()) {
      query = recall::ColdStartQuery(recall_config.num_bie, recall_total);
    } else {
      Rng rng(DeriveSeed(seed, {Tag(StreamTag::kEval), u}));
      FEDREC_ASSIGN_OR_RETURN(
          query, recall::BuildProtectedQuery(
                     HistoryReps(user.eval_history, *recall_news_reps),
                     *recall_params, recall_config, recall_total, &rng));
    }
    query.alpha = serving::CanonicalWeights(query.alpha);
    FEDREC_ASSIGN_OR_RETURN(
        const std::vector<int> list,
        recall::RecallCandidates(query, recall_params->bie,
                                 *recall_news_reps));
    metrics::ScoredImpression scored;
    for (int n : list) {
      scored.scores.push_back(reps.row(n).dot(user_vec));
      scored.labels.push_back(
          std::binary_search(future.begin(), future.end(), n) ? 1 : 0);
    }
    recalled.push_back(std::move(scored));
  }
  RankingEvaluation out;
  out.impressions = metrics::EvaluateImpressions(impressions, ties);
  out.recalled = metrics::EvaluateImpressions(recalled, ties);
  return out;
}

}  // namespace fedrec::app
