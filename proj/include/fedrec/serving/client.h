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

// Client side of a serving session: local logs, query construction and
// local ranking of the recalled candidates.

#ifndef FEDREC_SERVING_CLIENT_H_
#define FEDREC_SERVING_CLIENT_H_

#include <cstdint>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "absl/status/statusor.h"
#include "fedrec/base/random.h"
#include "fedrec/ranking/ranking_model.h"
#include "fedrec/recall/recall_model.h"
#include "fedrec/serving/protocol.h"

namespace fedrec::serving {

// Per-user device storage. The history never leaves the device.
class ClientStore {
 public:
  explicit ClientStore(std::string user_id,
                       std::vector<std::string> history = {});

  const std::string& user_id() const { return user_id_; }
  // Most recent last, at most recall::kMaxHistory; older clicks are evicted.
  const std::vector<std::string>& history() const { return history_; }
  const std::vector<std::vector<std::string>>& displayed_log() const {
    return displayed_log_;
  }
  const std::vector<std::string>& click_log() const { return click_log_; }
  // Bumped on every history change.
  uint64_t version() const { return version_; }

  void RecordDisplay(std::vector<std::string> displayed);
  void RecordClick(const std::string& news_id);

  // Query computed ahead of time for the current history, if any.
  const recall::ProtectedQuery* CachedQuery() const;
  void CacheQuery(recall::ProtectedQuery query);

 private:
  std::string user_id_;
  std::vector<std::string> history_;
  std::vector<std::vector<std::string>> displayed_log_;
  std::vector<std::string> click_log_;
  uint64_t version_ = 0;
  std::optional<recall::ProtectedQuery> cached_query_;
  uint64_t cached_version_ = 0;
};

// Models and the news encoder's view of the catalog, as distributed to every
// device.
struct ClientModels {
  const nn::Matrix* recall_news_reps = nullptr;  // rows by news index
  const std::unordered_map<std::string, int>* news_index = nullptr;
  const std::vector<std::vector<int>>* titles = nullptr;
  const recall::RecallParams* recall = nullptr;
  const recall::RecallConfig* recall_config = nullptr;
  const ranking::RankingParams* ranking = nullptr;
};

// Builds the protected query for the store's history (or the cold-start
// query for an empty one) and packs it into a request with canonical
// weights. Consumes `rng` for the session id, then for the interest noise.
// With `use_cache`, a query cached for the unchanged history is reused.
absl::StatusOr<RecallRequest> BuildRequest(ClientStore& store,
                                           const ClientModels& models,
                                           int total, bool use_cache, Rng& rng);

struct DisplayOutcome {
  std::vector<std::string> news_ids;
  std::vector<double> scores;
  bool clamped = false;  // fewer candidates than the display size
};

// Ranks the candidates with the local ranking model, records the top
// `display` in the store and returns them. Candidates already in the history
// are dropped first when `exclude_history` is set.
absl::StatusOr<DisplayOutcome> RankAndDisplay(ClientStore& store,
                                              const RecallResponse& response,
                                              const ClientModels& models,
                                              int display,
                                              bool exclude_history);

}  // namespace fedrec::serving

#endif  // FEDREC_SERVING_CLIENT_H_
