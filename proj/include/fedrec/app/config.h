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

// Run configuration. Every setting has a dotted key ("federated.lr") usable
// both in a JSON config file (as nested objects) and as a command-line flag.

#ifndef FEDREC_APP_CONFIG_H_
#define FEDREC_APP_CONFIG_H_

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "absl/status/status.h"
#include "absl/status/statusor.h"
#include "absl/strings/string_view.h"
#include "fedrec/data/dataset.h"
#include "fedrec/data/synthetic.h"
#include "fedrec/federated/federated.h"
#include "fedrec/ranking/ranking_model.h"
#include "fedrec/recall/recall_model.h"

namespace fedrec::app {

struct DatasetConfig {
  std::string path;
  std::string train_start = data::kDefaultTrainStart;
  std::string eval_start = data::kDefaultEvalStart;
  bool continue_on_error = false;
};

struct ModelConfig {
  recall::RecallConfig recall;
  ranking::RankingConfig ranking;
  // "encoder": recall runs on the trained ranking news encoder's outputs.
  // "planted": recall runs on the synthetic generator's planted vectors.
  std::string news_reps = "encoder";
};

struct EvalConfig {
  std::vector<int> k_list = {100, 200, 300, 400};
  int recall_total = 400;  // R
  int display = 10;        // D
  // Recall sizes are multiplied by pool / reference_pool (rounded up) when
  // the pool is smaller than reference_pool.
  bool scale_to_pool = true;
  int reference_pool = 4000;
  bool exclude_history = false;
  std::string auc_ties = "strict";  // or "half"
};

struct ServeConfig {
  int users = 10;
  int rounds = 3;
  double p_click = 0.7;
  bool cache_query = false;
};

struct RunConfig {
  DatasetConfig dataset;
  data::SyntheticSpec synthetic;
  ModelConfig model;
  federated::FedConfig federated;
  EvalConfig eval;
  ServeConfig serve;
  uint64_t seed = 1;

  absl::StatusOr<data::SplitBoundaries> Splits() const;
  // Applies the run seed to the nested sections that carry their own.
  void PropagateSeed();
};

enum class ValueKind { kInt, kUint, kDouble, kBool, kString, kIntList };

struct ConfigKey {
  std::string name;
  ValueKind kind;
  std::string help;
  // Value the published experiments used, or empty when the setting is
  // specific to this implementation.
  std::string published_default;
  std::function<std::string(const RunConfig&)> get;
  std::function<absl::Status(RunConfig&, absl::string_view)> set;
};

const std::vector<ConfigKey>& ConfigKeys();

absl::Status SetConfigValue(RunConfig& config, absl::string_view key,
                            absl::string_view value);
absl::StatusOr<std::string> GetConfigValue(const RunConfig& config,
                                           absl::string_view key);

// Nested JSON objects whose leaves are config keys; unknown keys fail.
absl::Status ApplyJsonConfig(RunConfig& config, absl::string_view json_text);
// Canonical nested JSON of every key, in registry order.
std::string ConfigToJson(const RunConfig& config);

// "desk" (the defaults) or "published" (published model sizes).
absl::Status ApplyPreset(RunConfig& config, absl::string_view preset);

absl::Status ValidateConfig(const RunConfig& config);

// Recall sizes after pool scaling.
std::vector<int> ScaledKList(const EvalConfig& eval, int pool);
int ScaledRecallTotal(const EvalConfig& eval, int pool);

}  // namespace fedrec::app

#endif  // FEDREC_APP_CONFIG_H_
