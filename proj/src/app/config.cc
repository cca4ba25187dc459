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

#include "fedrec/app/config.h"

#include <charconv>
#include <cmath>

#include "absl/strings/numbers.h"
#include "absl/strings/str_cat.h"
#include "absl/strings/str_join.h"
#include "absl/strings/str_split.h"
#include "fedrec/base/status_macros.h"
#include "json.hpp"

namespace fedrec::app {
namespace {

using nlohmann::json;
using nlohmann::ordered_json;

std::string FormatDouble(double v) {
  char buffer[64];
  const auto result = std::to_chars(buffer, buffer + sizeof(buffer), v);
  return std::string(buffer, result.ptr);
}

absl::Status BadValue(absl::string_view key, absl::string_view value,
                      absl::string_view expected) {
  return absl::InvalidArgumentError(
      absl::StrCat("invalid value '", value, "' for ", key, ": expected ",
                   expected));
}

absl::StatusOr<bool> ParseBool(absl::string_view key, absl::string_view v) {
  if (v == "true" || v == "1") return true;
  if (v == "false" || v == "0") return false;
  return BadValue(key, v, "true or false");
}

absl::StatusOr<std::vector<int>> ParseIntList(absl::string_view key,
                                              absl::string_view v) {
  std::vector<int> out;
  for (absl::string_view part : absl::StrSplit(v, ',', absl::SkipEmpty())) {
    int x = 0;
    if (!absl::SimpleAtoi(part, &x)) return BadValue(key, v, "integer list");
    out.push_back(x);
  }
  if (out.empty()) return BadValue(key, v, "non-empty integer list");
  return out;
}

template <typename T>
using Targets = std::function<std::vector<T*>(RunConfig&)>;

template <typename T>
ConfigKey MakeKey(std::string name, ValueKind kind, std::string help,
                  std::string published_default, Targets<T> targets) {
  ConfigKey key;
  key.name = name;
  key.kind = kind;
  key.help = std::move(help);
  key.published_default = std::move(published_default);
  key.get = [targets](const RunConfig& config) {
    const T& value = *targets(const_cast<RunConfig&>(config)).front();
    if constexpr (std::is_same_v<T, bool>) {
      return std::string(value ? "true" : "false");
    } else if constexpr (std::is_same_v<T, double>) {
      return FormatDouble(value);
    } else if constexpr (std::is_same_v<T, std::string>) {
      return value;
    } else if constexpr (std::is_same_v<T, std::vector<int>>) {
      return absl::StrJoin(value, ",");
    } else {
      return absl::StrCat(value);
    }
  };
  key.set = [name, targets](RunConfig& config,
                            absl::string_view text) -> absl::Status {
    T value{};
    if constexpr (std::is_same_v<T, bool>) {
      FEDREC_ASSIGN_OR_RETURN(value, ParseBool(name, text));
    } else if constexpr (std::is_same_v<T, double>) {
      if (!absl::SimpleAtod(text, &value) || !std::isfinite(value)) {
        return BadValue(name, text, "a finite number");
      }
    } else if constexpr (std::is_same_v<T, std::string>) {
      value = std::string(text);
    } else if constexpr (std::is_same_v<T, std::vector<int>>) {
      FEDREC_ASSIGN_OR_RETURN(value, ParseIntList(name, text));
    } else if constexpr (std::is_same_v<T, uint64_t>) {
      if (!absl::SimpleAtoi(text, &value)) {
        return BadValue(name, text, "a non-negative integer");
      }
    } else {
      if (!absl::SimpleAtoi(text, &value)) {
        return BadValue(name, text, "an integer");
      }
    }
    for (T* target : targets(config)) *target = value;
    return absl::OkStatus();
  };
  return key;
}

ConfigKey Int(std::string name, std::string help, std::string published,
              Targets<int> targets) {
  return MakeKey<int>(std::move(name), ValueKind::kInt, std::move(help),
                      std::move(published), std::move(targets));
}
ConfigKey Uint(std::string name, std::string help, std::string published,
               Targets<uint64_t> targets) {
  return MakeKey<uint64_t>(std::move(name), ValueKind::kUint, std::move(help),
                           std::move(published), std::move(targets));
}
ConfigKey Double(std::string name, std::string help, std::string published,
                 Targets<double> targets) {
  return MakeKey<double>(std::move(name), ValueKind::kDouble, std::move(help),
                         std::move(published), std::move(targets));
}
ConfigKey Bool(std::string name, std::string help, std::string published,
               Targets<bool> targets) {
  return MakeKey<bool>(std::move(name), ValueKind::kBool, std::move(help),
                       std::move(published), std::move(targets));
}
ConfigKey String(std::string name, std::string help, std::string published,
                 Targets<std::string> targets) {
  return MakeKey<std::string>(std::move(name), ValueKind::kString,
                              std::move(help), std::move(published),
                              std::move(targets));
}
ConfigKey IntList(std::string name, std::string help, std::string published,
                  Targets<std::vector<int>> targets) {
  return MakeKey<std::vector<int>>(std::move(name), ValueKind::kIntList,
                                   std::move(help), std::move(published),
                                   std::move(targets));
}

#define FEDREC_FIELD(type, expr) \
  [](RunConfig& c) { return std::vector<type*>{&(expr)}; }
#define FEDREC_FIELD2(type, a, b) \
  [](RunConfig& c) { return std::vector<type*>{&(a), &(b)}; }

std::vector<ConfigKey> BuildKeys() {
  std::vector<ConfigKey> keys;
  // Dataset.
  keys.push_back(String("dataset.path",
                        "directory holding news.tsv and behaviors.tsv", "",
                        FEDREC_FIELD(std::string, c.dataset.path)));
  keys.push_back(String("dataset.train_start",
                        "first training timestamp; earlier logs are history",
                        "", FEDREC_FIELD(std::string, c.dataset.train_start)));
  keys.push_back(String("dataset.eval_start",
                        "first held-out timestamp", "",
                        FEDREC_FIELD(std::string, c.dataset.eval_start)));
  keys.push_back(Bool("dataset.continue_on_error",
                      "skip malformed behavior lines instead of failing", "",
                      FEDREC_FIELD(bool, c.dataset.continue_on_error)));
  // Synthetic generator.
  keys.push_back(Int("synthetic.users", "number of users", "",
                     FEDREC_FIELD(int, c.synthetic.users)));
  keys.push_back(Int("synthetic.news", "number of news", "",
                     FEDREC_FIELD(int, c.synthetic.news)));
  keys.push_back(Int("synthetic.topics", "number of topics", "",
                     FEDREC_FIELD(int, c.synthetic.topics)));
  keys.push_back(Int("synthetic.subtopics", "subtopics per topic", "",
                     FEDREC_FIELD(int, c.synthetic.subtopics)));
  keys.push_back(Int("synthetic.topics_per_user", "topics each user follows",
                     "", FEDREC_FIELD(int, c.synthetic.topics_per_user)));
  keys.push_back(Int("synthetic.clicks_per_user", "logged history length", "",
                     FEDREC_FIELD(int, c.synthetic.clicks_per_user)));
  keys.push_back(Int("synthetic.train_impressions",
                     "training impressions per user", "",
                     FEDREC_FIELD(int, c.synthetic.train_impressions)));
  keys.push_back(Int("synthetic.eval_impressions",
                     "held-out impressions per user", "",
                     FEDREC_FIELD(int, c.synthetic.eval_impressions)));
  keys.push_back(Int("synthetic.impression_size", "news per impression", "",
                     FEDREC_FIELD(int, c.synthetic.impression_size)));
  keys.push_back(Double("synthetic.in_topic_fraction",
                        "share of displayed news drawn from followed topics",
                        "", FEDREC_FIELD(double, c.synthetic.in_topic_fraction)));
  keys.push_back(Double("synthetic.p_click",
                        "click probability of followed-topic news", "",
                        FEDREC_FIELD(double, c.synthetic.p_click)));
  keys.push_back(Double("synthetic.subtopic_focus",
                        "probability an interest draw hits the preferred "
                        "subtopic",
                        "", FEDREC_FIELD(double, c.synthetic.subtopic_focus)));
  keys.push_back(Int("synthetic.dim", "planted vector dimension", "",
                     FEDREC_FIELD(int, c.synthetic.dim)));
  keys.push_back(Double("synthetic.topic_scale", "topic centroid scale", "",
                        FEDREC_FIELD(double, c.synthetic.topic_scale)));
  keys.push_back(Double("synthetic.subtopic_scale", "subtopic offset scale",
                        "", FEDREC_FIELD(double, c.synthetic.subtopic_scale)));
  keys.push_back(Double("synthetic.item_scale", "per-item noise scale", "",
                        FEDREC_FIELD(double, c.synthetic.item_scale)));
  keys.push_back(Int("synthetic.words_per_topic", "topic vocabulary size", "",
                     FEDREC_FIELD(int, c.synthetic.words_per_topic)));
  keys.push_back(Int("synthetic.common_words", "shared vocabulary size", "",
                     FEDREC_FIELD(int, c.synthetic.common_words)));
  keys.push_back(Int("synthetic.title_length", "words per title", "",
                     FEDREC_FIELD(int, c.synthetic.title_length)));
  keys.push_back(Double("synthetic.topic_word_rate",
                        "share of title words from the topic vocabulary", "",
                        FEDREC_FIELD(double, c.synthetic.topic_word_rate)));
  // Model.
  keys.push_back(Int("model.dim", "news and user representation size", "256",
                     FEDREC_FIELD2(int, c.model.recall.dim,
                                   c.model.ranking.dim)));
  keys.push_back(Int("model.word_dim", "word embedding size", "300",
                     FEDREC_FIELD(int, c.model.ranking.word_dim)));
  keys.push_back(Int("model.heads", "self-attention heads", "16",
                     FEDREC_FIELD2(int, c.model.recall.heads,
                                   c.model.ranking.heads)));
  keys.push_back(Int("model.head_dim", "output size of each head", "16",
                     FEDREC_FIELD2(int, c.model.recall.head_dim,
                                   c.model.ranking.head_dim)));
  keys.push_back(Int("model.attention_hidden",
                     "hidden size of attention pooling networks", "128",
                     FEDREC_FIELD2(int, c.model.recall.attention_hidden,
                                   c.model.ranking.attention_hidden)));
  keys.push_back(Int("model.num_bie", "basic interest embeddings (B)", "30",
                     FEDREC_FIELD(int, c.model.recall.num_bie)));
  keys.push_back(Double("model.cluster_distance",
                        "clustering distance threshold (d_c)",
                        "1 (also reported as 2)",
                        FEDREC_FIELD(double, c.model.recall.cluster_distance)));
  keys.push_back(Double("model.clip", "interest score clip (delta)", "0.2",
                        FEDREC_FIELD(double, c.model.recall.ldp.clip)));
  keys.push_back(Double("model.interest_noise",
                        "interest score Laplace scale (lambda_I)", "1.2",
                        FEDREC_FIELD(double, c.model.recall.ldp.noise)));
  keys.push_back(Int("model.recall_negatives",
                     "negatives per recall positive (K_r)", "4",
                     FEDREC_FIELD(int, c.model.recall.negatives)));
  keys.push_back(Int("model.rank_negatives",
                     "negatives per ranking positive (K_g)", "4",
                     FEDREC_FIELD(int, c.model.ranking.negatives)));
  keys.push_back(Double("model.dropout", "dropout rate", "0.2",
                        FEDREC_FIELD2(double, c.model.recall.dropout,
                                      c.model.ranking.dropout)));
  keys.push_back(Bool("model.train_noise",
                      "perturb interest scores in the recall training loss",
                      "true", FEDREC_FIELD(bool, c.model.recall.train_noise)));
  keys.push_back(Double("model.init_limit", "uniform init half-width", "",
                        FEDREC_FIELD2(double, c.model.recall.init_limit,
                                      c.model.ranking.init_limit)));
  keys.push_back(Double("model.identity_init",
                        "identity added to attention projections at init", "",
                        FEDREC_FIELD2(double, c.model.recall.identity_init,
                                      c.model.ranking.identity_init)));
  keys.push_back(String("model.news_reps",
                        "news vectors for recall: encoder or planted", "",
                        FEDREC_FIELD(std::string, c.model.news_reps)));
  // Federated.
  keys.push_back(Double("federated.sample_ratio",
                        "share of clients sampled per round (r)", "0.02",
                        FEDREC_FIELD(double, c.federated.sample_ratio)));
  keys.push_back(Double("federated.clip", "gradient clip (theta)", "0.1",
                        FEDREC_FIELD(double, c.federated.clip)));
  keys.push_back(Double("federated.noise",
                        "gradient Laplace scale (lambda_g)", "0.01",
                        FEDREC_FIELD(double, c.federated.noise)));
  keys.push_back(Double("federated.lr", "learning rate (omega)", "0.05",
                        FEDREC_FIELD(double, c.federated.learning_rate)));
  keys.push_back(Int("federated.rounds", "maximum training rounds", "",
                     FEDREC_FIELD(int, c.federated.max_rounds)));
  keys.push_back(Int("federated.window",
                     "convergence window in rounds, 0 disables", "",
                     FEDREC_FIELD(int, c.federated.window)));
  keys.push_back(Double("federated.tolerance",
                        "relative loss improvement counted as progress", "",
                        FEDREC_FIELD(double, c.federated.tolerance)));
  keys.push_back(Int("federated.monitor_clients",
                     "fixed clients tracked for convergence, 0 uses the "
                     "sampled ones",
                     "", FEDREC_FIELD(int, c.federated.monitor_clients)));
  // Evaluation.
  keys.push_back(IntList("eval.k_list", "recall sizes reported as R@K",
                         "100,200,300,400",
                         FEDREC_FIELD(std::vector<int>, c.eval.k_list)));
  keys.push_back(Int("eval.recall_total", "candidates passed to ranking (R)",
                     "400", FEDREC_FIELD(int, c.eval.recall_total)));
  keys.push_back(Int("eval.display", "news displayed per session (D)", "",
                     FEDREC_FIELD(int, c.eval.display)));
  keys.push_back(Bool("eval.scale_to_pool",
                      "shrink recall sizes for pools below the reference",
                      "", FEDREC_FIELD(bool, c.eval.scale_to_pool)));
  keys.push_back(Int("eval.reference_pool",
                     "pool size at which recall sizes apply unscaled", "",
                     FEDREC_FIELD(int, c.eval.reference_pool)));
  keys.push_back(Bool("eval.exclude_history",
                      "drop already-clicked news before display", "",
                      FEDREC_FIELD(bool, c.eval.exclude_history)));
  keys.push_back(String("eval.auc_ties",
                        "AUC tie handling: strict or half", "strict",
                        FEDREC_FIELD(std::string, c.eval.auc_ties)));
  // Serving simulation.
  keys.push_back(Int("serve.users", "simulated users", "",
                     FEDREC_FIELD(int, c.serve.users)));
  keys.push_back(Int("serve.rounds", "sessions per user", "",
                     FEDREC_FIELD(int, c.serve.rounds)));
  keys.push_back(Double("serve.p_click",
                        "click probability of followed-topic news", "",
                        FEDREC_FIELD(double, c.serve.p_click)));
  keys.push_back(Bool("serve.cache_query",
                      "reuse the query while the history is unchanged", "",
                      FEDREC_FIELD(bool, c.serve.cache_query)));
  keys.push_back(Uint("seed", "root seed of every random stream", "",
                      FEDREC_FIELD(uint64_t, c.seed)));
  return keys;
}

#undef FEDREC_FIELD
#undef FEDREC_FIELD2

const ConfigKey* FindKey(absl::string_view name) {
  for (const ConfigKey& key : ConfigKeys()) {
    if (key.name == name) return &key;
  }
  return nullptr;
}

absl::Status ApplyJsonObject(RunConfig& config, const json& object,
                             const std::string& prefix) {
  for (const auto& [name, value] : object.items()) {
    const std::string key = prefix.empty() ? name : absl::StrCat(prefix, ".", name);
    if (value.is_object()) {
      FEDREC_RETURN_IF_ERROR(ApplyJsonObject(config, value, key));
      continue;
    }
    const ConfigKey* entry = FindKey(key);
    if (entry == nullptr) {
      return absl::InvalidArgumentError(
          absl::StrCat("unknown config key '", key, "'"));
    }
    std::string text;
    if (value.is_string()) {
      text = value.get<std::string>();
    } else if (value.is_array()) {
      std::vector<std::string> parts;
      for (const json& v : value) parts.push_back(v.dump());
      text = absl::StrJoin(parts, ",");
    } else {
      text = value.dump();
    }
    FEDREC_RETURN_IF_ERROR(entry->set(config, text));
  }
  return absl::OkStatus();
}

int ScaleSize(const EvalConfig& eval, int k, int pool) {
  if (!eval.scale_to_pool || pool >= eval.reference_pool) return k;
  const int64_t scaled =
      (static_cast<int64_t>(k) * pool + eval.reference_pool - 1) /
      eval.reference_pool;
  return static_cast<int>(std::max<int64_t>(1, scaled));
}

}  // namespace

absl::StatusOr<data::SplitBoundaries> RunConfig::Splits() const {
  data::SplitBoundaries splits;
  FEDREC_ASSIGN_OR_RETURN(splits.train_start,
                          data::ParseTimestamp(dataset.train_start));
  FEDREC_ASSIGN_OR_RETURN(splits.eval_start,
                          data::ParseTimestamp(dataset.eval_start));
  if (splits.eval_start < splits.train_start) {
    return absl::InvalidArgumentError(
        "dataset.eval_start precedes dataset.train_start");
  }
  return splits;
}

void RunConfig::PropagateSeed() {
  synthetic.seed = seed;
  federated.seed = seed;
}

const std::vector<ConfigKey>& ConfigKeys() {
  static const std::vector<ConfigKey>* keys =
      new std::vector<ConfigKey>(BuildKeys());
  return *keys;
}

absl::Status SetConfigValue(RunConfig& config, absl::string_view key,
                            absl::string_view value) {
  const ConfigKey* entry = FindKey(key);
  if (entry == nullptr) {
    return absl::InvalidArgumentError(
        absl::StrCat("unknown config key '", key, "'"));
  }
  return entry->set(config, value);
}

absl::StatusOr<std::string> GetConfigValue(const RunConfig& config,
                                           absl::string_view key) {
  const ConfigKey* entry = FindKey(key);
  if (entry == nullptr) {
    return absl::InvalidArgumentError(
        absl::StrCat("unknown config key '", key, "'"));
  }
  return entry->get(config);
}

absl::Status ApplyJsonConfig(RunConfig& config, absl::string_view json_text) {
  const json parsed = json::parse(json_text, nullptr, /*allow_exceptions=*/false);
  if (parsed.is_discarded() || !parsed.is_object()) {
    return absl::InvalidArgumentError("config is not a JSON object");
  }
  return ApplyJsonObject(config, parsed, "");
}

std::string ConfigToJson(const RunConfig& config) {
  ordered_json out = ordered_json::object();
  for (const ConfigKey& key : ConfigKeys()) {
    const std::string text = key.get(config);
    ordered_json value;
    switch (key.kind) {
      case ValueKind::kInt:
        value = std::stoll(text);
        break;
      case ValueKind::kUint:
        value = std::stoull(text);
        break;
      case ValueKind::kDouble:
        value = std::strtod(text.c_str(), nullptr);
        break;
      case ValueKind::kBool:
        value = text == "true";
        break;
      case ValueKind::kString:
        value = text;
        break;
      case ValueKind::kIntList: {
        value = ordered_json::array();
        for (absl::string_view part : absl::StrSplit(text, ',')) {
          int x = 0;
          if (absl::SimpleAtoi(part, &x)) value.push_back(x);
        }
        break;
      }
    }
    const size_t dot = key.name.find('.');
    if (dot == std::string::npos) {
      out[key.name] = std::move(value);
    } else {
      out[key.name.substr(0, dot)][key.name.substr(dot + 1)] = std::move(value);
    }
  }
  return out.dump(2) + "\n";
}

absl::Status ApplyPreset(RunConfig& config, absl::string_view preset) {
  if (preset == "desk") {
    const uint64_t seed = config.seed;
    config = RunConfig();
    config.seed = seed;
    return absl::OkStatus();
  }
  if (preset == "published") {
    for (const ConfigKey& key : ConfigKeys()) {
      if (key.published_default.empty()) continue;
      absl::string_view value = key.published_default;
      // Keep the leading value of annotated defaults.
      value = value.substr(0, value.find(' '));
      FEDREC_RETURN_IF_ERROR(key.set(config, value));
    }
    config.synthetic.dim = config.model.recall.dim;
    return absl::OkStatus();
  }
  return absl::InvalidArgumentError(
      absl::StrCat("unknown preset '", preset, "'; expected desk or published"));
}

absl::Status ValidateConfig(const RunConfig& config) {
  FEDREC_RETURN_IF_ERROR(config.Splits().status());
  FEDREC_RETURN_IF_ERROR(config.synthetic.Validate());
  FEDREC_RETURN_IF_ERROR(config.model.recall.Validate());
  FEDREC_RETURN_IF_ERROR(config.model.ranking.Validate());
  FEDREC_RETURN_IF_ERROR(config.federated.Validate());
  if (config.model.news_reps != "encoder" &&
      config.model.news_reps != "planted") {
    return absl::InvalidArgumentError(
        "model.news_reps must be encoder or planted");
  }
  for (int k : config.eval.k_list) {
    if (k <= 0) return absl::InvalidArgumentError("eval.k_list must be positive");
  }
  if (config.eval.recall_total <= 0 || config.eval.display <= 0 ||
      config.eval.reference_pool <= 0) {
    return absl::InvalidArgumentError(
        "eval.recall_total, eval.display and eval.reference_pool must be "
        "positive");
  }
  if (config.eval.auc_ties != "strict" && config.eval.auc_ties != "half") {
    return absl::InvalidArgumentError("eval.auc_ties must be strict or half");
  }
  if (config.serve.users < 0 || config.serve.rounds < 0) {
    return absl::InvalidArgumentError("serve.users and serve.rounds must be >= 0");
  }
  if (!(config.serve.p_click >= 0 && config.serve.p_click <= 1)) {
    return absl::InvalidArgumentError("serve.p_click must lie in [0, 1]");
  }
  return absl::OkStatus();
}

std::vector<int> ScaledKList(const EvalConfig& eval, int pool) {
  std::vector<int> out;
  for (int k : eval.k_list) out.push_back(ScaleSize(eval, k, pool));
  return out;
}

int ScaledRecallTotal(const EvalConfig& eval, int pool) {
  return ScaleSize(eval, eval.recall_total, pool);
}

}  // namespace fedrec::app
