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

#include "tests/support/fixtures.h"

#include <memory>
#include <utility>

#include "absl/strings/str_cat.h"
#include "fedrec/app/tasks.h"
#include "fedrec/base/random.h"
#include "fedrec/base/status_macros.h"
#include "fedrec/federated/federated.h"

namespace fedrec::testing {

data::SyntheticSpec TinySpec(int dim, uint64_t seed) {
  data::SyntheticSpec spec;
  spec.users = 24;
  spec.news = 120;
  spec.topics = 4;
  spec.subtopics = 2;
  spec.topics_per_user = 2;
  spec.clicks_per_user = 10;
  spec.train_impressions = 3;
  spec.eval_impressions = 2;
  spec.impression_size = 8;
  spec.dim = dim;
  spec.words_per_topic = 6;
  spec.common_words = 10;
  spec.title_length = 5;
  spec.seed = seed;
  return spec;
}

absl::StatusOr<SyntheticFixture> MakeFixture(const data::SyntheticSpec& spec) {
  SyntheticFixture fixture;
  FEDREC_ASSIGN_OR_RETURN(fixture.data, data::GenerateSynthetic(spec));
  FEDREC_ASSIGN_OR_RETURN(const int64_t train_start,
                          data::ParseTimestamp(data::kDefaultTrainStart));
  FEDREC_ASSIGN_OR_RETURN(const int64_t eval_start,
                          data::ParseTimestamp(data::kDefaultEvalStart));
  FEDREC_ASSIGN_OR_RETURN(
      fixture.corpus,
      data::BuildCorpus(fixture.data.news, fixture.data.behaviors,
                        data::SplitBoundaries{train_start, eval_start}));
  return fixture;
}

recall::RecallConfig SmallRecallConfig() {
  recall::RecallConfig config;
  config.dim = 8;
  config.heads = 2;
  config.head_dim = 4;
  config.attention_hidden = 6;
  config.num_bie = 4;
  config.negatives = 4;
  return config;
}

ranking::RankingConfig SmallRankingConfig() {
  ranking::RankingConfig config;
  config.word_dim = 8;
  config.dim = 8;
  config.heads = 2;
  config.head_dim = 4;
  config.attention_hidden = 6;
  config.negatives = 4;
  return config;
}

namespace {

constexpr int kHistory = 5;

// First user, in corpus order after skipping `skip` eligible ones, whose
// data supports the loss.
template <typename Pred>
const data::UserRecord* PickUser(const data::Corpus& corpus, uint64_t skip,
                                 Pred eligible) {
  std::vector<const data::UserRecord*> users;
  for (const auto& user : corpus.users) {
    if (eligible(user)) users.push_back(&user);
  }
  if (users.empty()) return nullptr;
  return users[skip % users.size()];
}

std::vector<int> LastClicks(const std::vector<int>& history) {
  const size_t n = std::min<size_t>(history.size(), kHistory);
  return std::vector<int>(history.end() - n, history.end());
}

}  // namespace

absl::StatusOr<GradientCase> RecallGradientCase(uint64_t seed) {
  FEDREC_ASSIGN_OR_RETURN(SyntheticFixture fixture,
                          MakeFixture(TinySpec(8, seed)));
  recall::RecallConfig config = SmallRecallConfig();
  config.ldp.clip = 1.0;
  config.ldp.noise = 0;
  config.train_noise = false;
  config.cluster_distance = 0.8;
  config.init_limit = 0.3;
  recall::RecallLossOptions options;
  options.inject_noise = false;
  options.dropout = seed % 2 == 1 ? 0.2 : 0.0;
  options.negatives = config.negatives;

  const data::UserRecord* user =
      PickUser(fixture.corpus, seed, [&](const data::UserRecord& u) {
        const recall::RecallExample e = data::MakeRecallExample(u);
        return e.history.size() >= kHistory && !e.positives.empty() &&
               static_cast<int>(e.negative_pool.size()) >= config.negatives;
      });
  if (user == nullptr) return absl::NotFoundError("no eligible recall user");
  recall::RecallExample example = data::MakeRecallExample(*user);
  example.history = LastClicks(example.history);

  Rng init_rng(DeriveSeed(seed, {Tag(StreamTag::kInit)}));
  recall::RecallParams params = recall::RecallParams::Initialize(config,
                                                                 init_rng);
  const uint64_t loss_seed = DeriveSeed(seed, {Tag(StreamTag::kClientLoss)});
  auto reps = std::make_shared<nn::Matrix>(fixture.data.news_vectors);

  GradientCase result;
  result.name = absl::StrCat("recall/", seed);
  result.loss = [reps, example, config, options,
                 loss_seed](absl::Span<const double> flat)
      -> absl::StatusOr<double> {
    recall::RecallParams p = recall::RecallParams::Zeros(config);
    FEDREC_RETURN_IF_ERROR(nn::Unflatten(flat, p.Params()));
    Rng rng(loss_seed);
    return recall::RecallLoss(example, *reps, p, config, options, rng,
                              nullptr);
  };
  result.params = nn::Flatten(params.Params());
  recall::RecallParams grads = recall::RecallParams::Zeros(config);
  Rng rng(loss_seed);
  FEDREC_RETURN_IF_ERROR(recall::RecallLoss(example, *reps, params, config,
                                            options, rng, &grads)
                             .status());
  result.analytic = nn::Flatten(grads.Params());
  return result;
}

absl::StatusOr<GradientCase> RankingGradientCase(uint64_t seed) {
  FEDREC_ASSIGN_OR_RETURN(SyntheticFixture fixture,
                          MakeFixture(TinySpec(8, seed)));
  ranking::RankingConfig config = SmallRankingConfig();
  config.init_limit = 0.3;
  ranking::RankingLossOptions options;
  options.dropout = seed % 2 == 1 ? 0.2 : 0.0;
  options.negatives = config.negatives;

  const data::UserRecord* user =
      PickUser(fixture.corpus, seed, [&](const data::UserRecord& u) {
        if (u.train_history.size() < kHistory) return false;
        for (const auto& imp : u.train) {
          if (!imp.clicked.empty() &&
              static_cast<int>(imp.unclicked.size()) >= config.negatives) {
            return true;
          }
        }
        return false;
      });
  if (user == nullptr) return absl::NotFoundError("no eligible ranking user");
  ranking::RankingExample example = data::MakeRankingExample(*user);
  example.history = LastClicks(example.history);

  const int vocab_size = fixture.corpus.vocab.size();
  Rng init_rng(DeriveSeed(seed, {Tag(StreamTag::kInit)}));
  ranking::RankingParams params =
      ranking::RankingParams::Initialize(config, vocab_size, init_rng);
  const uint64_t loss_seed = DeriveSeed(seed, {Tag(StreamTag::kClientLoss)});
  auto titles =
      std::make_shared<std::vector<std::vector<int>>>(fixture.corpus.titles);

  GradientCase result;
  result.name = absl::StrCat("ranking/", seed);
  result.loss = [titles, example, config, options, vocab_size,
                 loss_seed](absl::Span<const double> flat)
      -> absl::StatusOr<double> {
    ranking::RankingParams p = ranking::RankingParams::Zeros(config, vocab_size);
    FEDREC_RETURN_IF_ERROR(nn::Unflatten(flat, p.Params()));
    Rng rng(loss_seed);
    FEDREC_ASSIGN_OR_RETURN(
        ranking::RankingLossResult r,
        ranking::RankingLoss(example, *titles, p, options, rng, nullptr));
    return r.loss;
  };
  result.params = nn::Flatten(params.Params());
  ranking::RankingParams grads =
      ranking::RankingParams::Zeros(config, vocab_size);
  Rng rng(loss_seed);
  FEDREC_RETURN_IF_ERROR(
      ranking::RankingLoss(example, *titles, params, options, rng, &grads)
          .status());
  result.analytic = nn::Flatten(grads.Params());
  return result;
}

absl::StatusOr<double> RecallDegeneracyGap(uint64_t seed) {
  FEDREC_ASSIGN_OR_RETURN(SyntheticFixture fixture,
                          MakeFixture(TinySpec(8, seed)));
  const nn::Matrix& reps = fixture.data.news_vectors;
  recall::RecallConfig config = SmallRecallConfig();
  config.ldp.noise = 0;
  config.train_noise = false;
  config.dropout = 0.2;
  app::RecallClients clients =
      app::SelectRecallClients(fixture.corpus, config.negatives);
  if (clients.examples.empty()) return absl::NotFoundError("no clients");
  app::RecallTask task(&reps, clients.examples, config);

  Rng init_rng(DeriveSeed(seed, {Tag(StreamTag::kInit)}));
  recall::RecallParams params = recall::RecallParams::Initialize(config,
                                                                 init_rng);
  const std::vector<double> start = nn::Flatten(params.Params());

  federated::FedConfig fed;
  fed.sample_ratio = 1.0;
  fed.noise = 0;
  fed.clip = 1e6;
  fed.learning_rate = 0.05;
  fed.max_rounds = 1;
  fed.window = 0;
  fed.monitor_clients = 0;
  fed.seed = seed;
  FEDREC_ASSIGN_OR_RETURN(const federated::TrainResult trained,
                          federated::TrainFederated(task, start, fed));

  // Centralized: one buffer, every behavior weighted by 1 / total behaviors.
  double total = 0;
  for (const auto& e : clients.examples) total += e.positives.size();
  recall::RecallParams grads = recall::RecallParams::Zeros(config);
  recall::RecallLossOptions options;
  options.inject_noise = false;
  options.dropout = config.dropout;
  options.negatives = config.negatives;
  for (size_t u = 0; u < clients.examples.size(); ++u) {
    const auto& e = clients.examples[u];
    Rng rng(DeriveSeed(seed, {Tag(StreamTag::kClientLoss), 0, u}));
    FEDREC_RETURN_IF_ERROR(recall::RecallLoss(e, reps, params, config, options,
                                              rng, &grads,
                                              e.positives.size() / total)
                               .status());
  }
  const std::vector<double> g = nn::Flatten(grads.Params());
  double gap = 0;
  for (size_t i = 0; i < start.size(); ++i) {
    const double expected = start[i] - fed.learning_rate * g[i];
    gap = std::max(gap, std::abs(expected - trained.params[i]));
  }
  return gap;
}

}  // namespace fedrec::testing
