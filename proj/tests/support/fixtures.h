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

// Small seeded inputs shared by the unit tests and the acceptance suite.

#ifndef FEDREC_TESTS_SUPPORT_FIXTURES_H_
#define FEDREC_TESTS_SUPPORT_FIXTURES_H_

#include <cstdint>
#include <string>
#include <vector>

#include "absl/status/statusor.h"
#include "fedrec/data/corpus.h"
#include "fedrec/data/synthetic.h"
#include "fedrec/ranking/ranking_model.h"
#include "fedrec/recall/recall_model.h"
#include "tests/support/oracles.h"

namespace fedrec::testing {

// A few dozen users over a hundred news, planted vectors of size `dim`.
data::SyntheticSpec TinySpec(int dim, uint64_t seed);

struct SyntheticFixture {
  data::SyntheticData data;
  data::Corpus corpus;
};

// Generates `spec` and indexes it with the default split boundaries.
absl::StatusOr<SyntheticFixture> MakeFixture(const data::SyntheticSpec& spec);

// Recall model of width 8 with a bank of 4 embeddings.
recall::RecallConfig SmallRecallConfig();
// Ranking model of width 8.
ranking::RankingConfig SmallRankingConfig();

// A loss as a function of the flat parameters, with its analytic gradient
// at `params`. The function replays the same random draws on every call.
struct GradientCase {
  std::string name;
  ScalarFn loss;
  std::vector<double> params;
  std::vector<double> analytic;
};

// Recall loss of one user with 5 history clicks, interest noise off.
// Odd seeds also apply a fixed dropout mask.
absl::StatusOr<GradientCase> RecallGradientCase(uint64_t seed);
// Ranking loss of one user with 5 history clicks. Odd seeds also apply a
// fixed dropout mask.
absl::StatusOr<GradientCase> RankingGradientCase(uint64_t seed);

// Largest absolute difference between one federated recall round (every
// client sampled, no noise, clipping out of reach) and a centralized SGD step
// on the behavior-weighted full-batch loss, accumulated in one gradient
// buffer.
absl::StatusOr<double> RecallDegeneracyGap(uint64_t seed);

}  // namespace fedrec::testing

#endif  // FEDREC_TESTS_SUPPORT_FIXTURES_H_
