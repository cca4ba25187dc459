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

#include "fedrec/app/commands.h"

#include <fstream>
#include <map>
#include <ostream>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

#include "CLI11.hpp"
#include "absl/strings/str_cat.h"
#include "absl/strings/str_format.h"
#include "fedrec/app/tasks.h"
#include "fedrec/base/status_macros.h"
#include "fedrec/data/corpus.h"
#include "fedrec/data/synthetic.h"
#include "fedrec/federated/privacy_budget.h"
#include "fedrec/io/checkpoint.h"
#include "fedrec/metrics/metrics.h"
#include "fedrec/serving/client.h"
#include "fedrec/serving/server.h"
#include "fedrec/serving/simulation.h"

namespace fedrec::app {
namespace {

namespace fs = std::filesystem;

absl::Status WriteText(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) return absl::UnavailableError(absl::StrCat("cannot write ", path.string()));
  out << text;
  out.close();
  if (!out) return absl::UnavailableError(absl::StrCat("cannot write ", path.string()));
  return absl::OkStatus();
}

absl::StatusOr<std::string> ReadText(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) return absl::NotFoundError(absl::StrCat("cannot open ", path.string()));
  std::stringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

absl::Status PrepareOutput(const RunConfig& config,
                           const CommandOptions& options) {
  if (options.out.empty()) {
    return absl::InvalidArgumentError("--out is required");
  }
  std::error_code ec;
  fs::create_directories(options.out, ec);
  if (ec) {
    return absl::UnavailableError(absl::StrCat(
        "cannot create ", options.out.string(), ": ", ec.message()));
  }
  return WriteText(options.out / kConfigFile, ConfigToJson(config));
}

void Log(const CommandOptions& options, const std::string& line) {
  if (options.log != nullptr) *options.log << line << "\n";
}

struct LoadedData {
  data::Corpus corpus;
  fs::path dir;
};

absl::StatusOr<LoadedData> LoadData(const RunConfig& config,
                                    const CommandOptions& options) {
  if (config.dataset.path.empty()) {
    return absl::FailedPreconditionError(
        "no dataset; set dataset.path (or --data) to a directory made by "
        "gen-data or holding MIND-format news.tsv and behaviors.tsv");
  }
  LoadedData loaded;
  loaded.dir = config.dataset.path;
  FEDREC_ASSIGN_OR_RETURN(const data::SplitBoundaries splits, config.Splits());
  data::ParseOptions parse;
  parse.continue_on_error = config.dataset.continue_on_error;
  data::ParseStats stats;
  FEDREC_ASSIGN_OR_RETURN(loaded.corpus,
                          data::LoadCorpus(loaded.dir, splits, parse, &stats));
  Log(options, absl::StrCat("loaded ", loaded.corpus.num_news(), " news, ",
                            loaded.corpus.users.size(), " users, vocabulary ",
                            loaded.corpus.vocab.size(), ", skipped lines ",
                            stats.skipped));
  return loaded;
}

absl::StatusOr<ranking::RankingParams> LoadRanking(
    const RunConfig& config, const data::Corpus& corpus,
    const fs::path& path) {
  if (path.empty()) {
    return absl::FailedPreconditionError(
        "this command needs a ranking checkpoint; run train-rank first and "
        "pass its ranking.ckpt.json with --ranking-checkpoint");
  }
  FEDREC_ASSIGN_OR_RETURN(const io::Checkpoint checkpoint,
                          io::ReadCheckpoint(path));
  if (checkpoint.vocab != corpus.vocab.tokens()) {
    return absl::InvalidArgumentError(absl::StrCat(
        path.string(), " was trained with a different vocabulary than the "
        "dataset's; check dataset.path and the split boundaries"));
  }
  ranking::RankingParams params =
      ranking::RankingParams::Zeros(config.model.ranking, corpus.vocab.size());
  FEDREC_RETURN_IF_ERROR(
      io::RestoreParams(checkpoint, "ranking", params.Params()));
  return params;
}

absl::StatusOr<recall::RecallParams> LoadRecall(const RunConfig& config,
                                                const fs::path& path) {
  if (path.empty()) {
    return absl::FailedPreconditionError(
        "this command needs a recall checkpoint; run train-recall first and "
        "pass its recall.ckpt.json with --recall-checkpoint");
  }
  FEDREC_ASSIGN_OR_RETURN(const io::Checkpoint checkpoint,
                          io::ReadCheckpoint(path));
  recall::RecallParams params = recall::RecallParams::Zeros(config.model.recall);
  FEDREC_RETURN_IF_ERROR(
      io::RestoreParams(checkpoint, "recall", params.Params()));
  return params;
}

std::string PrivacyJson(const RunConfig& config) {
  return federated::MakePrivacyReport(
             config.federated.clip, config.federated.noise,
             config.model.recall.ldp.clip, config.model.recall.ldp.noise)
             .ToJson() +
         "\n";
}

federated::RoundCallback ProgressLogger(const CommandOptions& options,
                                        std::string* lines) {
  return [&options, lines](const federated::RoundLog& log) {
    absl::StrAppend(lines, log.ToJson(), "\n");
    if (log.round % 10 == 0) {
      Log(options, absl::StrFormat("round %d loss %.6f monitor %.6f (%.1f ms)",
                                   log.round, log.mean_loss, log.monitor_loss,
                                   log.wall_ms));
    }
  };
}

void LogTraining(const CommandOptions& options,
                 const federated::TrainResult& result, int clients,
                 int skipped) {
  std::string summary = absl::StrCat(
      "trained ", result.rounds.size(), " rounds on ", clients,
      " clients (", skipped, " users skipped), ",
      result.converged ? "converged" : "not converged");
  if (!result.rounds.empty()) {
    absl::StrAppend(&summary, absl::StrFormat(
                                  ", monitor loss %.6f -> %.6f",
                                  result.rounds.front().monitor_loss,
                                  result.rounds.back().monitor_loss));
  }
  Log(options, summary);
}

const char* TypeName(ValueKind kind) {
  switch (kind) {
    case ValueKind::kInt:
    case ValueKind::kUint:
      return "INT";
    case ValueKind::kDouble:
      return "FLOAT";
    case ValueKind::kBool:
      return "BOOL";
    case ValueKind::kString:
      return "TEXT";
    case ValueKind::kIntList:
      return "INT,...";
  }
  return "TEXT";
}

std::string Percent(double v) { return absl::StrFormat("%.6f", v); }

}  // namespace

absl::Status CmdGenData(const RunConfig& config,
                        const CommandOptions& options) {
  if (options.out.empty()) {
    return absl::InvalidArgumentError("--out is required");
  }
  std::error_code ec;
  if (fs::exists(options.out, ec) && !fs::is_empty(options.out, ec) &&
      !options.force) {
    return absl::AlreadyExistsError(absl::StrCat(
        options.out.string(),
        " already exists and is not empty; pass --force to overwrite"));
  }
  FEDREC_ASSIGN_OR_RETURN(const data::SyntheticData generated,
                          data::GenerateSynthetic(config.synthetic));
  FEDREC_RETURN_IF_ERROR(PrepareOutput(config, options));
  FEDREC_RETURN_IF_ERROR(data::WriteSynthetic(generated, options.out));
  Log(options, absl::StrCat("wrote ", generated.news.size(), " news and ",
                            generated.behaviors.size(), " impressions to ",
                            options.out.string()));
  return absl::OkStatus();
}

absl::Status CmdTrainRank(const RunConfig& config,
                          const CommandOptions& options) {
  FEDREC_ASSIGN_OR_RETURN(const LoadedData loaded, LoadData(config, options));
  FEDREC_RETURN_IF_ERROR(PrepareOutput(config, options));
  std::string rounds;
  FEDREC_ASSIGN_OR_RETURN(
      TrainedRanking trained,
      TrainRanking(loaded.corpus, config, ProgressLogger(options, &rounds)));
  LogTraining(options, trained.result, trained.clients, trained.skipped);
  FEDREC_RETURN_IF_ERROR(WriteText(options.out / kRankingRoundsFile, rounds));
  FEDREC_RETURN_IF_ERROR(io::WriteCheckpoint(
      io::MakeCheckpoint("ranking", ConfigToJson(config),
                         trained.params.Params(), loaded.corpus.vocab.tokens()),
      options.out / kRankingCheckpointFile));
  return WriteText(options.out / kPrivacyFile, PrivacyJson(config));
}

absl::Status CmdTrainRecall(const RunConfig& config,
                            const CommandOptions& options) {
  FEDREC_ASSIGN_OR_RETURN(const LoadedData loaded, LoadData(config, options));
  std::optional<ranking::RankingParams> ranking;
  if (config.model.news_reps == "encoder") {
    FEDREC_ASSIGN_OR_RETURN(
        ranking,
        LoadRanking(config, loaded.corpus, options.ranking_checkpoint));
  }
  FEDREC_ASSIGN_OR_RETURN(
      const nn::Matrix news_reps,
      RecallNewsReps(loaded.corpus, config,
                     ranking.has_value() ? &*ranking : nullptr, loaded.dir));
  FEDREC_RETURN_IF_ERROR(PrepareOutput(config, options));
  std::string rounds;
  FEDREC_ASSIGN_OR_RETURN(
      TrainedRecall trained,
      TrainRecall(loaded.corpus, news_reps, config,
                  ProgressLogger(options, &rounds)));
  LogTraining(options, trained.result, trained.clients, trained.skipped);
  FEDREC_RETURN_IF_ERROR(WriteText(options.out / kRecallRoundsFile, rounds));
  FEDREC_RETURN_IF_ERROR(io::WriteCheckpoint(
      io::MakeCheckpoint("recall", ConfigToJson(config),
                         trained.params.Params()),
      options.out / kRecallCheckpointFile));
  return WriteText(options.out / kPrivacyFile, PrivacyJson(config));
}

absl::Status CmdEval(const RunConfig& config, const CommandOptions& options) {
  FEDREC_ASSIGN_OR_RETURN(const LoadedData loaded, LoadData(config, options));
  const data::Corpus& corpus = loaded.corpus;
  std::optional<ranking::RankingParams> ranking;
  if (!options.ranking_checkpoint.empty() ||
      config.model.news_reps == "encoder") {
    FEDREC_ASSIGN_OR_RETURN(
        ranking, LoadRanking(config, corpus, options.ranking_checkpoint));
  }
  FEDREC_ASSIGN_OR_RETURN(const recall::RecallParams recall,
                          LoadRecall(config, options.recall_checkpoint));
  FEDREC_ASSIGN_OR_RETURN(
      const nn::Matrix news_reps,
      RecallNewsReps(corpus, config, ranking.has_value() ? &*ranking : nullptr,
                     loaded.dir));
  FEDREC_RETURN_IF_ERROR(PrepareOutput(config, options));

  const int pool = corpus.num_news();
  const std::vector<int> ks = ScaledKList(config.eval, pool);
  FEDREC_ASSIGN_OR_RETURN(
      const RecallEvaluation rec,
      EvaluateRecall(corpus, news_reps, recall, config.model.recall, ks,
                     config.seed, options.baseline_mean_pool));

  metrics::Report report;
  report.Add("pool", pool);
  report.Add("users", rec.users);
  report.Add("cold_users", rec.cold_users);
  for (size_t i = 0; i < ks.size(); ++i) {
    const std::string name = absl::StrCat(config.eval.k_list[i]);
    report.Add(absl::StrCat("K@", name), ks[i]);
    report.Add(absl::StrCat("R@", name), rec.future[i]);
    report.Add(absl::StrCat("history_rate@", name), rec.history[i]);
    if (options.baseline_mean_pool) {
      report.Add(absl::StrCat("mean_pool_R@", name), rec.baseline_future[i]);
      report.Add(absl::StrCat("mean_pool_history_rate@", name),
                 rec.baseline_history[i]);
    }
  }
  if (ranking.has_value()) {
    const metrics::TiePolicy ties = config.eval.auc_ties == "half"
                                        ? metrics::TiePolicy::kHalf
                                        : metrics::TiePolicy::kStrict;
    const int total = ScaledRecallTotal(config.eval, pool);
    FEDREC_ASSIGN_OR_RETURN(
        const RankingEvaluation rank,
        EvaluateRanking(corpus, *ranking, &recall, config.model.recall,
                        &news_reps, total, config.seed, ties));
    report.Add("impressions", rank.impressions.evaluated);
    report.Add("auc", rank.impressions.auc);
    report.Add("mrr", rank.impressions.mrr);
    report.Add("ndcg@5", rank.impressions.ndcg5);
    report.Add("ndcg@10", rank.impressions.ndcg10);
    report.Add("recall_total", total);
    report.Add("recalled_lists", rank.recalled.evaluated);
    report.Add("recalled_auc", rank.recalled.auc);
    report.Add("recalled_mrr", rank.recalled.mrr);
    report.Add("recalled_ndcg@5", rank.recalled.ndcg5);
    report.Add("recalled_ndcg@10", rank.recalled.ndcg10);
  }
  const federated::PrivacyReport privacy = federated::MakePrivacyReport(
      config.federated.clip, config.federated.noise,
      config.model.recall.ldp.clip, config.model.recall.ldp.noise);
  report.Add("epsilon_gradient", privacy.gradient);
  report.Add("epsilon_interest", privacy.interest);

  FEDREC_RETURN_IF_ERROR(
      WriteText(options.out / kMetricsJsonFile, report.ToJson() + "\n"));
  FEDREC_RETURN_IF_ERROR(WriteText(
      options.out / kMetricsCsvFile,
      absl::StrCat(report.CsvHeader(), "\n", report.CsvRow(), "\n")));
  for (size_t i = 0; i < ks.size(); ++i) {
    Log(options, absl::StrCat("R@", config.eval.k_list[i], " (K=", ks[i],
                              ") ", Percent(rec.future[i]), "%"));
  }
  return absl::OkStatus();
}

absl::Status CmdServeSim(const RunConfig& config,
                         const CommandOptions& options) {
  FEDREC_ASSIGN_OR_RETURN(const LoadedData loaded, LoadData(config, options));
  const data::Corpus& corpus = loaded.corpus;
  FEDREC_ASSIGN_OR_RETURN(
      const ranking::RankingParams ranking,
      LoadRanking(config, corpus, options.ranking_checkpoint));
  FEDREC_ASSIGN_OR_RETURN(const recall::RecallParams recall,
                          LoadRecall(config, options.recall_checkpoint));
  FEDREC_ASSIGN_OR_RETURN(
      const nn::Matrix news_reps,
      RecallNewsReps(corpus, config, &ranking, loaded.dir));
  FEDREC_RETURN_IF_ERROR(PrepareOutput(config, options));

  const int num_users =
      std::min<int>(config.serve.users, static_cast<int>(corpus.users.size()));
  std::vector<serving::ClientStore> stores;
  for (int u = 0; u < num_users; ++u) {
    std::vector<std::string> history;
    for (int n : corpus.users[u].eval_history) {
      history.push_back(corpus.news_ids[n]);
    }
    stores.emplace_back(corpus.users[u].id, std::move(history));
  }

  // Synthetic data carries planted topics; otherwise users click the news
  // they clicked in the held-out logs.
  std::vector<std::unordered_set<std::string>> liked(num_users);
  if (fs::exists(loaded.dir / data::kUserTruthFile)) {
    FEDREC_ASSIGN_OR_RETURN(const data::SyntheticTruth truth,
                            data::ReadSyntheticTruth(loaded.dir));
    std::unordered_map<std::string, int> user_row;
    for (size_t i = 0; i < truth.user_ids.size(); ++i) {
      user_row[truth.user_ids[i]] = static_cast<int>(i);
    }
    for (int u = 0; u < num_users; ++u) {
      auto it = user_row.find(corpus.users[u].id);
      if (it == user_row.end()) continue;
      const std::vector<int>& topics = truth.user_topics[it->second];
      for (size_t n = 0; n < truth.news_ids.size(); ++n) {
        if (std::find(topics.begin(), topics.end(), truth.news_topic[n]) !=
            topics.end()) {
          liked[u].insert(truth.news_ids[n]);
        }
      }
    }
  } else {
    for (int u = 0; u < num_users; ++u) {
      for (int n : corpus.users[u].EvalClicks()) {
        liked[u].insert(corpus.news_ids[n]);
      }
    }
  }
  const double p_click = config.serve.p_click;
  const serving::ClickModel clicks = [&liked, p_click](
                                         int user, const std::string& id,
                                         Rng& rng) {
    return liked[user].contains(id) && rng.Bernoulli(p_click);
  };

  serving::RecallServer server(recall.bie, news_reps, corpus.news_ids,
                               corpus.titles);
  serving::ClientModels models;
  models.recall_news_reps = &news_reps;
  models.news_index = &corpus.news_index;
  models.titles = &corpus.titles;
  models.recall = &recall;
  models.recall_config = &config.model.recall;
  models.ranking = &ranking;

  serving::SessionOptions session;
  session.rounds = config.serve.rounds;
  session.total = ScaledRecallTotal(config.eval, corpus.num_news());
  session.display = config.eval.display;
  session.exclude_history = config.eval.exclude_history;
  session.cache_query = config.serve.cache_query;
  session.seed = config.seed;
  FEDREC_ASSIGN_OR_RETURN(
      const serving::SessionTrace trace,
      serving::SimulateSessions(stores, server, models, clicks, session));

  std::string lines;
  for (const std::string& line : trace.lines) absl::StrAppend(&lines, line, "\n");
  FEDREC_RETURN_IF_ERROR(WriteText(options.out / kTraceFile, lines));
  FEDREC_RETURN_IF_ERROR(WriteText(
      options.out / kAuditFile,
      absl::StrCat("{\"sessions\":", trace.lines.size(), ",\"trace_hash\":\"",
                   absl::StrFormat("%016x", trace.hash),
                   "\",\"audit\":", trace.audit.ToJson(), "}\n")));
  Log(options, absl::StrCat("simulated ", trace.lines.size(), " sessions, ",
                            trace.audit.leaks, " history leaks"));
  return absl::OkStatus();
}

int ExitCodeFor(const absl::Status& status) {
  if (status.ok()) return kExitOk;
  if (status.code() == absl::StatusCode::kAborted) return kExitNumerical;
  return kExitData;
}

int RunCli(int argc, char** argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Privacy-preserving two-stage news recommendation simulator",
               "fedrec"};
  app.require_subcommand(1, 1);
  app.get_formatter()->column_width(44);

  std::string config_path;
  std::string preset;
  CommandOptions options;
  std::string out_dir;
  app.add_option("--config", config_path,
                 "JSON config file; nested objects map to dotted keys");
  app.add_option("--preset", preset, "desk (default) or published model sizes")
      ->check(CLI::IsMember({"desk", "published"}));
  app.add_option("--out", out_dir, "output directory");
  app.add_flag("--force", options.force,
               "let gen-data overwrite a non-empty output directory");

  // Every config key is a flag; flags win over the config file.
  const RunConfig defaults;
  std::map<std::string, std::string> overrides;
  std::map<std::string, CLI::Option*> flags;
  for (const ConfigKey& key : ConfigKeys()) {
    std::string names = key.name == "seed" ? "--seed" : "--" + key.name;
    if (key.name == "dataset.path") names += ",--data";
    if (key.name == "federated.rounds") names += ",--rounds";
    std::string description = key.help;
    if (!key.published_default.empty()) {
      absl::StrAppend(&description, " [published: ", key.published_default, "]");
    }
    absl::StrAppend(&description, " [default: ", key.get(defaults), "]");
    flags[key.name] = app.add_option(names, overrides[key.name], description)
                          ->type_name(TypeName(key.kind))
                          ->group("Config keys");
  }

  CLI::App* gen = app.add_subcommand("gen-data", "write a synthetic dataset");
  CLI::App* train_rank =
      app.add_subcommand("train-rank", "train the ranking model federatedly");
  CLI::App* train_recall = app.add_subcommand(
      "train-recall", "train the recall model federatedly");
  CLI::App* eval = app.add_subcommand("eval", "evaluate trained checkpoints");
  CLI::App* serve = app.add_subcommand(
      "serve-sim", "simulate serving sessions and audit client messages");
  std::string recall_checkpoint;
  std::string ranking_checkpoint;
  std::string baseline;
  for (CLI::App* sub : {gen, train_rank, train_recall, eval, serve}) {
    sub->fallthrough();
  }
  for (CLI::App* sub : {train_recall, eval, serve}) {
    sub->add_option("--ranking-checkpoint", ranking_checkpoint,
                    "ranking.ckpt.json written by train-rank");
  }
  for (CLI::App* sub : {eval, serve}) {
    sub->add_option("--recall-checkpoint", recall_checkpoint,
                    "recall.ckpt.json written by train-recall");
  }
  eval->add_option("--baseline", baseline,
                   "also report a single-vector baseline")
      ->check(CLI::IsMember({"mean-pool"}));

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  RunConfig config;
  if (!preset.empty()) {
    if (absl::Status s = ApplyPreset(config, preset); !s.ok()) {
      err << "error: " << s.message() << "\n";
      return kExitUsage;
    }
  }
  if (!config_path.empty()) {
    absl::StatusOr<std::string> text = ReadText(config_path);
    if (!text.ok()) {
      err << "error: " << text.status().message() << "\n";
      return kExitUsage;
    }
    if (absl::Status s = ApplyJsonConfig(config, *text); !s.ok()) {
      err << "error: " << config_path << ": " << s.message() << "\n";
      return kExitUsage;
    }
  }
  for (const ConfigKey& key : ConfigKeys()) {
    if (flags[key.name]->count() == 0) continue;
    if (absl::Status s = key.set(config, overrides[key.name]); !s.ok()) {
      err << "error: " << s.message() << "\n";
      return kExitUsage;
    }
  }
  config.PropagateSeed();
  if (absl::Status s = ValidateConfig(config); !s.ok()) {
    err << "error: invalid configuration: " << s.message() << "\n";
    return kExitUsage;
  }
  if (out_dir.empty()) {
    err << "error: --out is required\n";
    return kExitUsage;
  }
  options.out = out_dir;
  options.recall_checkpoint = recall_checkpoint;
  options.ranking_checkpoint = ranking_checkpoint;
  options.baseline_mean_pool = baseline == "mean-pool";
  options.log = &err;

  absl::Status status;
  if (gen->parsed()) {
    status = CmdGenData(config, options);
  } else if (train_rank->parsed()) {
    status = CmdTrainRank(config, options);
  } else if (train_recall->parsed()) {
    status = CmdTrainRecall(config, options);
  } else if (eval->parsed()) {
    status = CmdEval(config, options);
  } else {
    status = CmdServeSim(config, options);
  }
  if (!status.ok()) err << "error: " << status.message() << "\n";
  return ExitCodeFor(status);
}

}  // namespace fedrec::app
