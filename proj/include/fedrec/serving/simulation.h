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

#ifndef FEDREC_SERVING_SIMULATION_H_
#define FEDREC_SERVING_SIMULATION_H_

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "absl/status/statusor.h"
#include "absl/strings/string_view.h"
#include "fedrec/base/random.h"
#include "fedrec/serving/client.h"
#include "fedrec/serving/server.h"

namespace fedrec::serving {

// Whether user `user` clicks a displayed news item.
using ClickModel =
    std::function<bool(int user, const std::string& news_id, Rng& rng)>;

struct SessionOptions {
  int rounds = 3;
  int total = 50;   // R
  int display = 10;  // D
  bool exclude_history = false;
  bool cache_query = false;
  uint64_t seed = 0;
};

struct PrivacyAudit {
  int messages = 0;  // outbound client messages scanned
  int leaks = 0;     // history ids found in them
  std::vector<std::string> examples;

  std::string ToJson() const;
};

struct SessionTrace {
  std::vector<std::string> lines;  // one JSON object per session
  uint64_t hash = 0;               // FNV-1a over the lines
  PrivacyAudit audit;
};

// Occurrences of history ids in `message` as whole tokens: bounded by
// characters that cannot be part of an id.
int CountHistoryLeaks(absl::string_view message,
                      const std::vector<std::string>& history);

uint64_t Fnv1a(absl::string_view data,
               uint64_t hash = 14695981039346656037ull);

// For each round, for each store in order: build a request, scan it against
// the store's history, pass it to the server as serialized text, rank and
// display the candidates, then draw clicks. Randomness is derived from
// (seed, round, user), so the trace is a function of the inputs.
absl::StatusOr<SessionTrace> SimulateSessions(std::vector<ClientStore>& stores,
                                              const RecallServer& server,
                                              const ClientModels& models,
                                              const ClickModel& clicks,
                                              const SessionOptions& options);

}  // namespace fedrec::serving

#endif  // FEDREC_SERVING_SIMULATION_H_
