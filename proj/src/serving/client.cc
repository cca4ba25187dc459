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

#include "fedrec/serving/client.h"

#include <algorithm>
#include <unordered_set>

#include "absl/strings/str_cat.h"
#include "fedrec/base/status_macros.h"

namespace fedrec::serving {
namespace {

std::vector<int> KnownIndices(const std::vector<std::string>& ids,
                              const ClientModels& models) {
  std::vector<int> out;
  for (const std::string& id : ids) {
    auto it = models.news_index->find(id);
    if (it != models.news_index->end()) out.push_back(it->second);
  }
  return out;
}

}  // namespace

ClientStore::ClientStore(std::string user_id, std::vector<std::string> history)
    : user_id_(std::move(user_id)), history_(std::move(history)) {
  if (history_.size() > recall::kMaxHistory) {
    history_.erase(history_.begin(), history_.end() - recall::kMaxHistory);
  }
}

void ClientStore::RecordDisplay(std::vector<std::string> displayed) {
  displayed_log_.push_back(std::move(displayed));
}

void ClientStore::RecordClick(const std::string& news_id) {
  click_log_.push_back(news_id);
  history_.push_back(news_id);
  if (history_.size() > recall::kMaxHistory) history_.erase(history_.begin());
  ++version_;
}

const recall::ProtectedQuery* ClientStore::CachedQuery() const {
  if (cached_query_.has_value() && cached_version_ == version_) {
    return &*cached_query_;
  }
  return nullptr;
}

void ClientStore::CacheQuery(recall::ProtectedQuery query) {
  cached_query_ = std::move(query);
  cached_version_ = version_;
}

absl::StatusOr<RecallRequest> BuildRequest(ClientStore& store,
                                           const ClientModels& models,
                                           int total, bool use_cache,
                                           Rng& rng) {
  RecallRequest request;
  request.session_id = NewSessionId(rng);
  recall::ProtectedQuery query;
  if (const recall::ProtectedQuery* cached = store.CachedQuery();
      use_cache && cached != nullptr) {
    query = *cached;
  } else {
    const std::vector<int> history = KnownIndices(store.history(), models);
    if (history.empty()) {
      query = recall::ColdStartQuery(models.recall->bie.size(), total);
    } else {
      FEDREC_ASSIGN_OR_RETURN(
          query, recall::BuildProtectedQuery(
                     nn::GatherRows(*models.recall_news_reps, history),
                     *models.recall, *models.recall_config, total, &rng));
    }
    if (use_cache) store.CacheQuery(query);
  }
  request.alpha = CanonicalWeights(query.alpha);
  request.quotas = query.quotas;
  return request;
}

absl::StatusOr<DisplayOutcome> RankAndDisplay(ClientStore& store,
                                              const RecallResponse& response,
                                              const ClientModels& models,
                                              int display,
                                              bool exclude_history) {
  if (!response.error.empty()) {
    return absl::FailedPreconditionError(
        absl::StrCat("recall failed: ", response.error));
  }
  if (display < 0) return absl::InvalidArgumentError("display size < 0");
  const std::unordered_set<std::string> seen(store.history().begin(),
                                             store.history().end());
  std::vector<const Candidate*> candidates;
  for (const Candidate& c : response.candidates) {
    if (exclude_history && seen.contains(c.news_id)) continue;
    candidates.push_back(&c);
  }
  DisplayOutcome outcome;
  if (display > static_cast<int>(candidates.size())) {
    display = static_cast<int>(candidates.size());
    outcome.clamped = true;
  }

  const ranking::RankingParams& model = *models.ranking;
  nn::Matrix reps(candidates.size(), model.dim());
  std::vector<int> positions(candidates.size());
  for (size_t i = 0; i < candidates.size(); ++i) {
    FEDREC_ASSIGN_OR_RETURN(
        const nn::Vector rep,
        ranking::EncodeNewsOrEmpty(candidates[i]->title, model));
    reps.row(i) = rep.transpose();
    positions[i] = static_cast<int>(i);
  }
  nn::Vector user = nn::Vector::Zero(model.dim());
  const std::vector<int> history = KnownIndices(store.history(), models);
  if (!history.empty()) {
    nn::Matrix clicked(history.size(), model.dim());
    for (size_t i = 0; i < history.size(); ++i) {
      FEDREC_ASSIGN_OR_RETURN(
          const nn::Vector rep,
          ranking::EncodeNewsOrEmpty((*models.titles)[history[i]], model));
      clicked.row(i) = rep.transpose();
    }
    FEDREC_ASSIGN_OR_RETURN(user, ranking::EncodeUser(clicked, model));
  }
  // Labels are recall positions, so score ties keep the recall order.
  FEDREC_ASSIGN_OR_RETURN(
      const std::vector<ranking::RankedItem> ranked,
      ranking::RankCandidates(user, reps, positions, display));
  for (const ranking::RankedItem& item : ranked) {
    outcome.news_ids.push_back(candidates[item.news]->news_id);
    outcome.scores.push_back(item.score);
  }
  store.RecordDisplay(outcome.news_ids);
  return outcome;
}

}  // namespace fedrec::serving
