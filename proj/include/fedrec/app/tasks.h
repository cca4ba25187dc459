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

// Training and evaluation pipelines shared by the command-line tool and the
// experiments.

#ifndef FEDREC_APP_TASKS_H_
#define FEDREC_APP_TASKS_H_

#include <filesystem>
#include <optional>
#include <vector>

#include "absl/status/statusor.h"
#include "absl/types/span.h"
#include "fedrec/app/config.h"
#include "fedrec/data/corpus.h"
#include "fedrec/federated/federated.h"
#include "fedrec/metrics/metrics.h"
#include "fedrec/nn/tensor.h"
#include "fedrec/ranking/ranking_model.h"
#include "fedrec/recall/recall_model.h"

namespace fedrec::app {

// One client per eligible user: a non-empty history, at least one training
// click and at least `negatives` distinct unclicked training news.
class RecallTask : public federated::FederatedTask {
 public:
  RecallTask(const nn::Matrix* news_reps,
             std::vector<recall::RecallExample> examples,
             recall::RecallConfig config);

  int NumClients() const override {
    return static_cast<int>(examples_.size());
  }
  size_t NumParams() const override { return num_params_; }
  absl::StatusOr<federated::ClientResult> ComputeClient(
      int client, absl::Span<const double> params, uint64_t seed,
      bool with_grads) const override;

 private:
  const nn::Matrix* news_reps_;
  std::vector<recall::RecallExample> examples_;
  recall::RecallConfig config_;
  size_t num_params_ = 0;
};

// One client per user with a non-empty history and at least one training
// impression holding a click and `negatives` unclicked news.
class RankingTask : public federated::FederatedTask {
 public:
  RankingTask(const std::vector<std::vector<int>>* titles, int vocab_size,
              std::vector<ranking::RankingExample> examples,
              ranking::RankingConfig config);

  int NumClients() const override {
    return static_cast<int>(examples_.size());
  }
  size_t NumParams() const override { return num_params_; }
  absl::StatusOr<federated::ClientResult> ComputeClient(
      int client, absl::Span<const double> params, uint64_t seed,
      bool with_grads) const override;

 private:
  const std::vector<std::vector<int>>* titles_;
  int vocab_size_;
  std::vector<ranking::RankingExample> examples_;
  ranking::RankingConfig config_;
  size_t num_params_ = 0;
};

struct ClientData {
  std::vector<int> users;  // corpus user index per client
  int skipped = 0;         // users without usable training data
};

struct RecallClients : ClientData {
  std::vector<recall::RecallExample> examples;
};
struct RankingClients : ClientData {
  std::vector<ranking::RankingExample> examples;
};

RecallClients SelectRecallClients(const data::Corpus& corpus, int negatives);
RankingClients SelectRankingClients(const data::Corpus& corpus, int negatives);

// Initial parameters are a function of the run seed alone.
recall::RecallParams InitialRecallParams(const RunConfig& config);
ranking::RankingParams InitialRankingParams(const RunConfig& config,
                                            int vocab_size);

struct TrainedRecall {
  recall::RecallParams params;
  federated::TrainResult result;
  int clients = 0;
  int skipped = 0;
};

struct TrainedRanking {
  ranking::RankingParams params;
  federated::TrainResult result;
  int clients = 0;
  int skipped = 0;
};

absl::StatusOr<TrainedRecall> TrainRecall(
    const data::Corpus& corpus, const nn::Matrix& news_reps,
    const RunConfig& config, const federated::RoundCallback& on_round = {});

absl::StatusOr<TrainedRanking> TrainRanking(
    const data::Corpus& corpus, const RunConfig& config,
    const federated::RoundCallback& on_round = {});

// News vectors the recall model works on: the ranking news encoder's outputs
// or, for synthetic data, the planted vectors read from `dataset_dir`.
absl::StatusOr<nn::Matrix> RecallNewsReps(
    const data::Corpus& corpus, const RunConfig& config,
    const ranking::RankingParams* ranking,
    const std::filesystem::path& dataset_dir);

// History vectors of a user, most recent last.
nn::Matrix HistoryReps(const std::vector<int>& history,
                       const nn::Matrix& news_reps);

struct RecallEvaluation {
  std::vector<int> ks;
  std::vector<double> future;   // R@K over held-out clicks, percent
  std::vector<double> history;  // historical-click recall rate, percent
  // Single mean-pooled query, when requested.
  std::vector<double> baseline_future;
  std::vector<double> baseline_history;
  int users = 0;       // users with held-out clicks
  int cold_users = 0;  // of which had no history
};

// Each user's protected query is drawn once, with noise seeded by
// (seed, user), and re-allocated for every K.
absl::StatusOr<RecallEvaluation> EvaluateRecall(
    const data::Corpus& corpus, const nn::Matrix& news_reps,
    const recall::RecallParams& params, const recall::RecallConfig& config,
    absl::Span<const int> ks, uint64_t seed, bool baseline);

struct RankingEvaluation {
  metrics::ImpressionMetrics impressions;  // held-out impressions
  metrics::ImpressionMetrics recalled;     // recalled candidate lists
};

// Scores held-out impressions, and (when `recall_params` is set) each user's
// recalled candidate list labeled by held-out clicks.
absl::StatusOr<RankingEvaluation> EvaluateRanking(
    const data::Corpus& corpus, const ranking::RankingParams& ranking,
    const recall::RecallParams* recall_params,
    const recall::RecallConfig& recall_config,
    const nn::Matrix* recall_news_reps, int recall_total, uint64_t seed,
    metrics::TiePolicy ties);

}  // namespace fedrec::app

#endif  // FEDREC_APP_TASKS_H_
