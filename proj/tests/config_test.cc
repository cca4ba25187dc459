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

#include <set>
#include <string>
#include <vector>

#include "fedrec/app/config.h"
#include "gtest/gtest.h"
#include "json.hpp"

namespace fedrec::app {
namespace {

TEST(ConfigKeysTest, UniqueAndReadable) {
  std::set<std::string> names;
  const RunConfig config;
  for (const ConfigKey& key : ConfigKeys()) {
    EXPECT_TRUE(names.insert(key.name).second) << key.name;
    EXPECT_FALSE(key.help.empty()) << key.name;
    EXPECT_TRUE(GetConfigValue(config, key.name).ok()) << key.name;
  }
  EXPECT_TRUE(names.contains("model.interest_noise"));
  EXPECT_TRUE(names.contains("federated.sample_ratio"));
  EXPECT_TRUE(names.contains("seed"));
}

TEST(ConfigKeysTest, SetAndGet) {
  RunConfig config;
  ASSERT_TRUE(SetConfigValue(config, "model.interest_noise", "0.4").ok());
  EXPECT_EQ(config.model.recall.ldp.noise, 0.4);
  EXPECT_EQ(*GetConfigValue(config, "model.interest_noise"), "0.4");
  ASSERT_TRUE(SetConfigValue(config, "model.dropout", "0.1").ok());
  EXPECT_EQ(config.model.recall.dropout, 0.1);
  EXPECT_EQ(config.model.ranking.dropout, 0.1);
  ASSERT_TRUE(SetConfigValue(config, "eval.k_list", "5,10").ok());
  EXPECT_EQ(config.eval.k_list, (std::vector<int>{5, 10}));
  ASSERT_TRUE(SetConfigValue(config, "serve.cache_query", "true").ok());
  EXPECT_TRUE(config.serve.cache_query);

  EXPECT_FALSE(SetConfigValue(config, "model.nope", "1").ok());
  EXPECT_FALSE(SetConfigValue(config, "model.dim", "x").ok());
  EXPECT_FALSE(SetConfigValue(config, "model.clip", "nan").ok());
  EXPECT_FALSE(SetConfigValue(config, "serve.cache_query", "maybe").ok());
  EXPECT_FALSE(SetConfigValue(config, "eval.k_list", "").ok());
}

TEST(ConfigJsonTest, NestedObjectsAndRoundTrip) {
  RunConfig config;
  ASSERT_TRUE(ApplyJsonConfig(config, R"({
      "seed": 7,
      "model": {"num_bie": 12, "news_reps": "planted"},
      "federated": {"sample_ratio": 0.5},
      "eval": {"k_list": [10, 20]}})")
                  .ok());
  EXPECT_EQ(config.seed, 7u);
  EXPECT_EQ(config.model.recall.num_bie, 12);
  EXPECT_EQ(config.model.news_reps, "planted");
  EXPECT_EQ(config.federated.sample_ratio, 0.5);
  EXPECT_EQ(config.eval.k_list, (std::vector<int>{10, 20}));

  RunConfig copy;
  ASSERT_TRUE(ApplyJsonConfig(copy, ConfigToJson(config)).ok());
  EXPECT_EQ(ConfigToJson(copy), ConfigToJson(config));
  const auto j = nlohmann::json::parse(ConfigToJson(config));
  EXPECT_EQ(j["model"]["num_bie"].get<int>(), 12);

  EXPECT_FALSE(ApplyJsonConfig(config, "[1]").ok());
  EXPECT_FALSE(ApplyJsonConfig(config, R"({"model": {"bogus": 1}})").ok());
}

TEST(ConfigPresetTest, PublishedSizes) {
  RunConfig config;
  config.seed = 9;
  ASSERT_TRUE(ApplyPreset(config, "published").ok());
  EXPECT_EQ(config.model.recall.dim, 256);
  EXPECT_EQ(config.model.recall.num_bie, 30);
  EXPECT_EQ(config.model.recall.ldp.noise, 1.2);
  EXPECT_EQ(config.model.recall.cluster_distance, 1.0);
  EXPECT_EQ(config.federated.sample_ratio, 0.02);
  EXPECT_EQ(config.synthetic.dim, 256);
  EXPECT_TRUE(ValidateConfig(config).ok());
  ASSERT_TRUE(ApplyPreset(config, "desk").ok());
  EXPECT_EQ(ConfigToJson(config), [] {
    RunConfig fresh;
    fresh.seed = 9;
    return ConfigToJson(fresh);
  }());
  EXPECT_FALSE(ApplyPreset(config, "huge").ok());
}

TEST(ConfigValidateTest, CatchesBadValues) {
  RunConfig config;
  EXPECT_TRUE(ValidateConfig(config).ok());
  config.model.news_reps = "other";
  EXPECT_FALSE(ValidateConfig(config).ok());
  config = RunConfig();
  config.eval.k_list = {0};
  EXPECT_FALSE(ValidateConfig(config).ok());
  config = RunConfig();
  config.dataset.eval_start = "1/1/2000 1:00:00 AM";
  EXPECT_FALSE(ValidateConfig(config).ok());
  config = RunConfig();
  config.serve.p_click = 2;
  EXPECT_FALSE(ValidateConfig(config).ok());
  config = RunConfig();
  config.federated.sample_ratio = 0;
  EXPECT_FALSE(ValidateConfig(config).ok());
}

TEST(ConfigScaleTest, RecallSizesFollowThePool) {
  EvalConfig eval;
  EXPECT_EQ(ScaledKList(eval, 500), (std::vector<int>{13, 25, 38, 50}));
  EXPECT_EQ(ScaledRecallTotal(eval, 500), 50);
  EXPECT_EQ(ScaledKList(eval, 8000), eval.k_list);
  EXPECT_EQ(ScaledRecallTotal(eval, 1), 1);
  eval.scale_to_pool = false;
  EXPECT_EQ(ScaledKList(eval, 500), eval.k_list);
}

}  // namespace
}  // namespace fedrec::app
