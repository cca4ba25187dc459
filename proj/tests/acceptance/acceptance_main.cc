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

// Acceptance suite. Prints one PASS/FAIL line per criterion and exits
// nonzero when a criterion fails that is not listed with --known-fail.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <set>
#include <string>
#include <tuple>
#include <vector>

#include "CLI11.hpp"
#include "absl/strings/str_cat.h"
#include "absl/strings/str_format.h"
#include "absl/strings/str_join.h"
#include "fedrec/app/config.h"
#include "fedrec/app/tasks.h"
#include "fedrec/base/random.h"
#include "fedrec/base/status_macros.h"
#include "fedrec/cluster/clustering.h"
#include "fedrec/data/corpus.h"
#include "fedrec/data/synthetic.h"
#include "fedrec/federated/federated.h"
#include "fedrec/federated/privacy_budget.h"
#include "fedrec/metrics/metrics.h"
#include "fedrec/recall/recall_model.h"
#include "fedrec/serving/client.h"
#include "fedrec/serving/protocol.h"
#include "fedrec/serving/server.h"
#include "fedrec/serving/simulation.h"
#include "json.hpp"
#include "tests/support/fixtures.h"
#include "tests/support/oracles.h"

namespace fedrec::acceptance {
namespace {

using Clock = std::chrono::steady_clock;

double Seconds(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

struct Outcome {
  bool pass = false;
  std::string detail;
};

// ---------------------------------------------------------------------------
// 1. Analytic gradients against central differences.

Outcome GradientCheck() {
  const auto start = Clock::now();
  int cases = 0, failures = 0, checked = 0;
  double worst = 0, worst_abs = 0;
  std::string worst_case;
  for (uint64_t seed = 1; seed <= 20; ++seed) {
    for (const auto& make :
         {testing::RecallGradientCase, testing::RankingGradientCase}) {
      absl::StatusOr<testing::GradientCase> c = make(seed);
      if (!c.ok()) return {false, std::string(c.status().message())};
      absl::StatusOr<testing::GradientCheck> check = testing::CheckGradient(
          c->loss, c->params, c->analytic, 1e-6, 1e-4, 1e-8);
      if (!check.ok()) return {false, std::string(check.status().message())};
      ++cases;
      checked += check->checked;
      failures += check->failures;
      worst_abs = std::max(worst_abs, check->max_abs_error);
      if (check->max_rel_error > worst) {
        worst = check->max_rel_error;
        worst_case = c->name;
      }
    }
  }
  const double elapsed = Seconds(start);
  return {failures == 0 && elapsed < 60,
          absl::StrFormat("%d losses, %d entries, %d beyond rtol 1e-4; "
                          "max abs error %.1e; worst rel above atol %.2e (%s); "
                          "%.1f s (limit 60 s)",
                          cases, checked, failures, worst_abs, worst,
                          worst_case.empty() ? "none" : worst_case,
                          elapsed)};
}

// ---------------------------------------------------------------------------
// 2. One federated round with every client and no noise equals one
// centralized step.

Outcome Degeneracy() {
  double worst = 0;
  for (uint64_t seed = 1; seed <= 3; ++seed) {
    absl::StatusOr<double> gap = testing::RecallDegeneracyGap(seed);
    if (!gap.ok()) return {false, std::string(gap.status().message())};
    worst = std::max(worst, *gap);
  }
  return {worst < 1e-9,
          absl::StrFormat("max |federated - centralized| = %.3e over 3 seeds "
                          "(limit 1e-9)",
                          worst)};
}

// ---------------------------------------------------------------------------
// 3. Laplace perturbation moments and clip bounds.

Outcome LaplaceAndClipping() {
  const recall::LdpConfig ldp;  // delta 0.2, lambda_I 1.2
  Rng rng(DeriveSeed(3, {Tag(StreamTag::kEval)}));
  const int n = 100000;
  const nn::Vector zeros = nn::Vector::Zero(n);
  const nn::Vector noisy = recall::PerturbScores(zeros, ldp, rng);
  const double mean = noisy.mean();
  const double var = (noisy.array() - mean).square().sum() / (n - 1);
  const double expected_var = 2 * ldp.noise * ldp.noise;

  // Clipping alone never leaves [-delta, delta] or [-theta, theta].
  bool bounded = true;
  recall::LdpConfig clip_only = ldp;
  clip_only.noise = 0;
  const federated::FedConfig fed;
  for (int t = 0; t < 1000; ++t) {
    nn::Vector scores(30);
    std::vector<double> grads(30);
    for (int i = 0; i < 30; ++i) {
      scores(i) = 10 * rng.Normal();
      grads[i] = 10 * rng.Normal();
    }
    const nn::Vector clipped = recall::PerturbScores(scores, clip_only, rng);
    if (clipped.cwiseAbs().maxCoeff() > ldp.clip) bounded = false;
    for (double g : federated::ProtectGradients(grads, fed.clip, 0.0, rng)) {
      if (std::abs(g) > fed.clip) bounded = false;
    }
  }
  const bool moments = std::abs(mean) <= 0.02 &&
                       std::abs(var - expected_var) <= 0.03 * expected_var;
  return {moments && bounded,
          absl::StrFormat("1e5 draws at lambda 1.2: mean %.4f (limit 0.02), "
                          "variance %.4f vs %.2f (limit 3%%); clip bounds %s",
                          mean, var, expected_var,
                          bounded ? "held" : "violated")};
}

// ---------------------------------------------------------------------------
// 4. Privacy budgets of the default configuration.

Outcome PrivacyBudgets() {
  const app::RunConfig config;
  const federated::PrivacyReport report = federated::MakePrivacyReport(
      config.federated.clip, config.federated.noise,
      config.model.recall.ldp.clip, config.model.recall.ldp.noise);
  return {report.gradient == "20" && report.interest == "1/3",
          absl::StrCat("epsilon_g = ", report.gradient,
                       " (expected 20), epsilon_I = ", report.interest,
                       " (expected 1/3)")};
}

// ---------------------------------------------------------------------------
// 5. Clustering against a brute-force oracle, ties included.

Outcome ClusteringOracle() {
  int mismatches = 0, lattice = 0;
  std::string first;
  for (uint64_t seed = 1; seed <= 500; ++seed) {
    Rng rng(DeriveSeed(seed, {Tag(StreamTag::kEval), 5}));
    const int n = 1 + static_cast<int>(rng.UniformInt(8));
    nn::Matrix points;
    double threshold;
    if (seed % 2 == 0) {
      // Integer points on a line produce exactly tied linkages.
      ++lattice;
      points.resize(n, 1);
      for (int i = 0; i < n; ++i) points(i, 0) = rng.UniformInt(6);
      threshold = rng.UniformInt(7) / 2.0;
    } else {
      const int dim = 1 + static_cast<int>(rng.UniformInt(3));
      points.resize(n, dim);
      for (int i = 0; i < points.size(); ++i) points.data()[i] = rng.Normal();
      threshold = rng.Uniform(0, 3);
    }
    absl::StatusOr<cluster::ClusterAssignment> got =
        cluster::ClusterAverageLinkage(points, threshold);
    if (!got.ok()) return {false, std::string(got.status().message())};
    if (got->clusters !=
        testing::BruteForceAverageLinkage(points, threshold)) {
      if (mismatches++ == 0) first = absl::StrCat(" (first at seed ", seed, ")");
    }
  }
  return {mismatches == 0,
          absl::StrCat("500 point sets of 1-8 points (", lattice,
                       " with exact ties): ", mismatches, " mismatches", first)};
}

// ---------------------------------------------------------------------------
// 6. Metrics against brute-force oracles and hand cases.

Outcome MetricOracles() {
  int mismatches = 0;
  auto check = [&](bool ok) {
    if (!ok) ++mismatches;
  };
  auto near = [](double a, double b) { return std::abs(a - b) <= 1e-12; };
  using D = std::vector<double>;
  using I = std::vector<int>;
  check(near(*metrics::Auc(D{0.9, 0.4, 0.6}, I{1, 0, 1}), 1.0));
  check(near(*metrics::Auc(D{0.5, 0.9, 0.2}, I{1, 0, 0}), 0.5));
  check(near(*metrics::Mrr(D{0.9, 0.5, 0.7, 0.1}, I{1, 1, 0, 0}), 2.0 / 3));
  check(near(*metrics::NdcgAtK(D{0.9, 0.8, 0.7, 0.6, 0.5}, I{0, 1, 0, 1, 0}, 5),
             (1 / std::log2(3.0) + 1 / std::log2(5.0)) /
                 (1 + 1 / std::log2(3.0))));
  check(near(metrics::RecallAtK({{1, 2}, {1, 2, 3, 4}}, {{1, 7}, {4, 8}}, 2)
                 .percent,
             37.5));

  Rng rng(DeriveSeed(6, {Tag(StreamTag::kEval)}));
  int impressions = 0;
  for (int t = 0; t < 100; ++t) {
    const int n = 2 + static_cast<int>(rng.UniformInt(12));
    D scores;
    I labels;
    for (int i = 0; i < n; ++i) {
      scores.push_back(rng.UniformInt(5) / 4.0);
      labels.push_back(rng.Bernoulli(0.3) ? 1 : 0);
    }
    ++impressions;
    const double auc = testing::BruteAuc(scores, labels, 0.0);
    const auto got_auc = metrics::Auc(scores, labels);
    check(auc < 0 ? !got_auc.has_value()
                  : got_auc.has_value() && near(*got_auc, auc));
    const double mrr = testing::BruteMrr(scores, labels);
    const auto got_mrr = metrics::Mrr(scores, labels);
    check(mrr < 0 ? !got_mrr.has_value()
                  : got_mrr.has_value() && near(*got_mrr, mrr));
    for (int k : {5, 10}) {
      const double ndcg = testing::BruteNdcg(scores, labels, k);
      const auto got = metrics::NdcgAtK(scores, labels, k);
      check(ndcg < 0 ? !got.has_value() : got.has_value() && near(*got, ndcg));
    }
    std::vector<int> recalled = rng.SampleWithoutReplacement(20, 10);
    std::vector<int> targets = rng.SampleWithoutReplacement(20, 3);
    check(near(metrics::RecallAtK({targets}, {recalled}, 7).percent,
               testing::BruteRecallFraction(targets, recalled, 7)));
  }
  return {mismatches == 0,
          absl::StrCat("5 hand cases and ", impressions,
                       " random impressions (AUC, MRR, nDCG@5/10, R@K): ",
                       mismatches, " mismatches")};
}

// ---------------------------------------------------------------------------
// Synthetic recall experiments shared by criteria 7, 8 and 10.

struct RecallRun {
  double future = 0;        // R@50, percent
  double history = 0;       // historical-click recall rate at 50, percent
  double base_future = 0;   // mean-pool baseline
  double base_history = 0;
  int rounds = 0;
  bool converged = false;
  double first_loss = 0;
  double last_loss = 0;
};

constexpr int kRecallK = 50;

class Experiments {
 public:
  absl::StatusOr<RecallRun> Run(uint64_t seed, double interest_noise,
                                double sample_ratio) {
    const auto key = std::make_tuple(seed, interest_noise, sample_ratio);
    if (auto it = cache_.find(key); it != cache_.end()) return it->second;

    app::RunConfig config;
    config.seed = seed;
    config.PropagateSeed();
    config.model.news_reps = "planted";
    config.model.recall.ldp.noise = interest_noise;
    config.federated.sample_ratio = sample_ratio;

    FEDREC_ASSIGN_OR_RETURN(const data::SyntheticData* data, Data(config));
    FEDREC_ASSIGN_OR_RETURN(const data::SplitBoundaries splits,
                            config.Splits());
    FEDREC_ASSIGN_OR_RETURN(
        const data::Corpus corpus,
        data::BuildCorpus(data->news, data->behaviors, splits));
    FEDREC_ASSIGN_OR_RETURN(
        const app::TrainedRecall trained,
        app::TrainRecall(corpus, data->news_vectors, config));
    const std::vector<int> ks = {kRecallK};
    FEDREC_ASSIGN_OR_RETURN(
        const app::RecallEvaluation eval,
        app::EvaluateRecall(corpus, data->news_vectors, trained.params,
                            config.model.recall, ks, config.seed,
                            /*baseline=*/true));
    RecallRun run;
    run.future = eval.future[0];
    run.history = eval.history[0];
    run.base_future = eval.baseline_future[0];
    run.base_history = eval.baseline_history[0];
    run.rounds = static_cast<int>(trained.result.rounds.size());
    run.converged = trained.result.converged;
    if (!trained.result.rounds.empty()) {
      run.first_loss = trained.result.rounds.front().monitor_loss;
      run.last_loss = trained.result.rounds.back().monitor_loss;
    }
    cache_.emplace(key, run);
    return run;
  }

 private:
  absl::StatusOr<const data::SyntheticData*> Data(
      const app::RunConfig& config) {
    auto it = data_.find(config.seed);
    if (it == data_.end()) {
      FEDREC_ASSIGN_OR_RETURN(data::SyntheticData generated,
                              data::GenerateSynthetic(config.synthetic));
      it = data_.emplace(config.seed, std::move(generated)).first;
    }
    return &it->second;
  }

  std::map<std::tuple<uint64_t, double, double>, RecallRun> cache_;
  std::map<uint64_t, data::SyntheticData> data_;
};

constexpr double kDefaultNoise = 1.2;
constexpr double kDefaultRatio = 0.02;

// 7. Multi-channel recall against the mean-pooled single query.

Outcome MultiInterest(Experiments& experiments) {
  const auto start = Clock::now();
  double ours = 0, base = 0, ours_clean = 0;
  std::vector<std::string> per_seed;
  for (uint64_t seed = 1; seed <= 5; ++seed) {
    absl::StatusOr<RecallRun> run =
        experiments.Run(seed, kDefaultNoise, kDefaultRatio);
    if (!run.ok()) return {false, std::string(run.status().message())};
    absl::StatusOr<RecallRun> clean = experiments.Run(seed, 0.0, kDefaultRatio);
    if (!clean.ok()) return {false, std::string(clean.status().message())};
    ours += run->future / 5;
    base += run->base_future / 5;
    ours_clean += clean->future / 5;
    per_seed.push_back(absl::StrFormat("%.1f", run->future));
  }
  const double elapsed = Seconds(start);
  const double relative = base > 0 ? ours / base - 1 : 0;
  return {ours > base && relative >= 0.10 && elapsed < 300,
          absl::StrFormat("mean R@50 %.2f%% [%s] vs mean-pool %.2f%% "
                          "(relative %+.1f%%, need +10%%); lambda_I=0 gives "
                          "%.2f%%; %.0f s (limit 300 s)",
                          ours, absl::StrJoin(per_seed, " "), base,
                          100 * relative, ours_clean, elapsed)};
}

// 8. Interest noise sweep.

Outcome PrivacyUtility(Experiments& experiments) {
  const auto start = Clock::now();
  const std::vector<double> noises = {0, 0.4, 0.8, 1.2, 1.6, 2.0};
  std::vector<double> history, future;
  for (double noise : noises) {
    double h = 0, f = 0;
    for (uint64_t seed = 1; seed <= 5; ++seed) {
      absl::StatusOr<RecallRun> run =
          experiments.Run(seed, noise, kDefaultRatio);
      if (!run.ok()) return {false, std::string(run.status().message())};
      h += run->history / 5;
      f += run->future / 5;
    }
    history.push_back(h);
    future.push_back(f);
  }
  int violations = 0;
  for (size_t i = 0; i + 1 < history.size(); ++i) {
    if (history[i + 1] > history[i]) ++violations;
  }
  const double elapsed = Seconds(start);
  auto fmt = [](const std::vector<double>& v) {
    return absl::StrJoin(v, " ", [](std::string* out, double x) {
      absl::StrAppend(out, absl::StrFormat("%.2f", x));
    });
  };
  return {violations <= 1 && future.back() < future.front() && elapsed < 900,
          absl::StrFormat("lambda_I 0..2.0: history rate [%s] (%d increases, "
                          "1 allowed); R@50 [%s] (2.0 below 0: %s); %.0f s "
                          "(limit 900 s)",
                          fmt(history), violations, fmt(future),
                          future.back() < future.front() ? "yes" : "no",
                          elapsed)};
}

// ---------------------------------------------------------------------------
// 9. Client messages never carry history ids and have a fixed size.

Outcome ServingPrivacy() {
  absl::StatusOr<testing::SyntheticFixture> fixture =
      testing::MakeFixture(testing::TinySpec(8, 9));
  if (!fixture.ok()) return {false, std::string(fixture.status().message())};
  const data::Corpus& corpus = fixture->corpus;
  recall::RecallConfig recall_config = testing::SmallRecallConfig();
  recall_config.cluster_distance = 0.8;
  Rng init(DeriveSeed(9, {Tag(StreamTag::kInit)}));
  const recall::RecallParams recall =
      recall::RecallParams::Initialize(recall_config, init);
  const ranking::RankingParams ranking = ranking::RankingParams::Initialize(
      testing::SmallRankingConfig(), corpus.vocab.size(), init);
  const serving::RecallServer server(recall.bie, fixture->data.news_vectors,
                                     corpus.news_ids, corpus.titles);
  serving::ClientModels models;
  models.recall_news_reps = &fixture->data.news_vectors;
  models.news_index = &corpus.news_index;
  models.titles = &corpus.titles;
  models.recall = &recall;
  models.recall_config = &recall_config;
  models.ranking = &ranking;

  Rng rng(DeriveSeed(9, {Tag(StreamTag::kEval)}));
  int messages = 0, leaks = 0, size_violations = 0;
  // Request size per (channels, total), across all history lengths.
  std::map<std::pair<int, int>, size_t> sizes;
  std::set<size_t> history_lengths;
  for (int session = 0; session < 1000; ++session) {
    std::vector<std::string> history;
    const int length = static_cast<int>(rng.UniformInt(61));
    for (int i = 0; i < length; ++i) {
      history.push_back(rng.Bernoulli(0.05)
                            ? absl::StrCat("X", rng.UniformInt(1000))
                            : corpus.news_ids[rng.UniformInt(corpus.num_news())]);
    }
    std::vector<serving::ClientStore> stores;
    stores.emplace_back(absl::StrCat("fuzz", session), history);
    history_lengths.insert(stores[0].history().size());
    serving::SessionOptions options;
    options.rounds = 1;
    options.total = session % 2 == 0 ? 20 : 1 + rng.UniformInt(60);
    options.display = 1 + rng.UniformInt(12);
    options.exclude_history = rng.Bernoulli(0.5);
    options.seed = rng.NextU64();
    const serving::ClickModel clicks = [](int, const std::string&, Rng& r) {
      return r.Bernoulli(0.5);
    };
    absl::StatusOr<serving::SessionTrace> trace =
        serving::SimulateSessions(stores, server, models, clicks, options);
    if (!trace.ok()) return {false, std::string(trace.status().message())};
    messages += trace->audit.messages;
    leaks += trace->audit.leaks;

    // Rebuild the request this session sent and record its size.
    const auto line = nlohmann::json::parse(trace->lines[0]);
    const auto& request = line["request"];
    const int channels = static_cast<int>(request["alpha"].size());
    const std::string wire = request.dump();
    absl::StatusOr<serving::RecallRequest> parsed =
        serving::ParseRequest(wire);
    if (!parsed.ok()) return {false, std::string(parsed.status().message())};
    const size_t size = serving::SerializeRequest(*parsed).size();
    auto [it, inserted] =
        sizes.emplace(std::make_pair(channels, options.total), size);
    if (!inserted && it->second != size) ++size_violations;
  }
  return {leaks == 0 && size_violations == 0 && messages == 1000,
          absl::StrFormat("%d fuzzed sessions, %d messages, %d history ids "
                          "found; %d distinct history lengths, %d request "
                          "sizes differing at fixed (C, B, R)",
                          1000, messages, leaks,
                          static_cast<int>(history_lengths.size()),
                          size_violations)};
}

// ---------------------------------------------------------------------------
// 10. Convergence across sampling ratios.

Outcome Convergence(Experiments& experiments) {
  const auto start = Clock::now();
  const std::vector<double> ratios = {0.02, 0.10, 0.50};
  std::vector<double> mean_rounds;
  bool all_converged = true;
  std::vector<std::string> detail;
  for (double r : ratios) {
    double sum = 0;
    std::vector<std::string> counts;
    for (uint64_t seed = 1; seed <= 3; ++seed) {
      absl::StatusOr<RecallRun> run = experiments.Run(seed, kDefaultNoise, r);
      if (!run.ok()) return {false, std::string(run.status().message())};
      if (!run->converged || run->rounds > 300) all_converged = false;
      sum += run->rounds;
      counts.push_back(absl::StrCat(run->converged ? "" : ">", run->rounds));
    }
    mean_rounds.push_back(sum / 3);
    detail.push_back(absl::StrFormat("r=%.2f: %s (mean %.1f)", r,
                                     absl::StrJoin(counts, "/"), sum / 3));
  }
  const bool monotone = mean_rounds[0] >= mean_rounds[1] &&
                        mean_rounds[1] >= mean_rounds[2];
  return {all_converged && monotone,
          absl::StrFormat("%s; all converged within 300: %s; mean rounds "
                          "non-increasing in r: %s; %.0f s",
                          absl::StrJoin(detail, ", "),
                          all_converged ? "yes" : "no",
                          monotone ? "yes" : "no", Seconds(start))};
}

}  // namespace
}  // namespace fedrec::acceptance

int main(int argc, char** argv) {
  using namespace fedrec::acceptance;
  CLI::App app{"fedrec acceptance suite"};
  std::string report_path;
  std::vector<int> known_fail;
  std::vector<int> only;
  app.add_option("--report", report_path, "also write the lines to this file");
  app.add_option("--known-fail", known_fail,
                 "criteria expected to fail; they do not fail the run")
      ->delimiter(',');
  app.add_option("--only", only, "run only these criteria")->delimiter(',');
  CLI11_PARSE(app, argc, argv);

  Experiments experiments;
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria =
      {
          {"gradient check", GradientCheck},
          {"federated degeneracy", Degeneracy},
          {"Laplace perturbation and clipping", LaplaceAndClipping},
          {"privacy budgets", PrivacyBudgets},
          {"clustering oracle", ClusteringOracle},
          {"metric oracles", MetricOracles},
          {"multi-interest recall beats mean pooling",
           [&] { return MultiInterest(experiments); }},
          {"privacy/utility trade-off", [&] { return PrivacyUtility(experiments); }},
          {"serving privacy and message size", ServingPrivacy},
          {"convergence across sampling ratios",
           [&] { return Convergence(experiments); }},
      };

  std::ofstream report;
  if (!report_path.empty()) report.open(report_path, std::ios::trunc);
  int unexpected = 0;
  for (size_t i = 0; i < criteria.size(); ++i) {
    const int id = static_cast<int>(i) + 1;
    if (!only.empty() &&
        std::find(only.begin(), only.end(), id) == only.end()) {
      continue;
    }
    const Outcome outcome = criteria[i].second();
    const bool expected_fail =
        std::find(known_fail.begin(), known_fail.end(), id) != known_fail.end();
    std::string status = outcome.pass ? "PASS" : "FAIL";
    if (outcome.pass && expected_fail) status = "XPASS";
    if (!outcome.pass && expected_fail) status = "FAIL (known limitation)";
    if (!outcome.pass && !expected_fail) ++unexpected;
    const std::string line = absl::StrCat(status, " [", id, "] ",
                                          criteria[i].first, ": ",
                                          outcome.detail);
    std::cout << line << std::endl;
    if (report.is_open()) report << line << "\n" << std::flush;
  }
  return unexpected == 0 ? 0 : 1;
}
