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

#include "fedrec/serving/simulation.h"

#include <cctype>

#include "absl/strings/str_cat.h"
#include "absl/strings/str_join.h"
#include "fedrec/base/status_macros.h"
#include "json.hpp"

namespace fedrec::serving {
namespace {

constexpr int kMaxLeakExamples = 10;

bool IdChar(char c) {
  return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '-';
}

std::string JsonList(const std::vector<std::string>& ids) {
  return nlohmann::json(ids).dump();
}

}  // namespace

std::string PrivacyAudit::ToJson() const {
  return absl::StrCat("{\"messages\":", messages, ",\"leaks\":", leaks,
                      ",\"examples\":", JsonList(examples), "}");
}

int CountHistoryLeaks(absl::string_view message,
                      const std::vector<std::string>& history) {
  int leaks = 0;
  for (const std::string& id : history) {
    if (id.empty()) continue;
    for (size_t pos = message.find(id); pos != absl::string_view::npos;
         pos = message.find(id, pos + 1)) {
      const bool left = pos == 0 || !IdChar(message[pos - 1]);
      const size_t end = pos + id.size();
      const bool right = end == message.size() || !IdChar(message[end]);
      if (left && right) ++leaks;
    }
  }
  return leaks;
}

uint64_t Fnv1a(absl::string_view data, uint64_t hash) {
  for (unsigned char c : data) {
    hash ^= c;
    hash *= 1099511628211ull;
  }
  return hash;
}

absl::StatusOr<SessionTrace> SimulateSessions(std::vector<ClientStore>& stores,
                                              const RecallServer& server,
                                              const ClientModels& models,
                                              const ClickModel& clicks,
                                              const SessionOptions& options) {
  SessionTrace trace;
  trace.hash = Fnv1a("");
  for (int round = 0; round < options.rounds; ++round) {
    for (size_t u = 0; u < stores.size(); ++u) {
      ClientStore& store = stores[u];
      const uint64_t r = static_cast<uint64_t>(round);
      Rng rng(DeriveSeed(options.seed, {Tag(StreamTag::kServing), r, u}));
      const size_t history_before = store.history().size();
      FEDREC_ASSIGN_OR_RETURN(
          const RecallRequest request,
          BuildRequest(store, models, options.total, options.cache_query, rng));
      const std::string outbound = SerializeRequest(request);
      ++trace.audit.messages;
      const int leaks = CountHistoryLeaks(outbound, store.history());
      if (leaks > 0) {
        trace.audit.leaks += leaks;
        if (trace.audit.examples.size() < kMaxLeakExamples) {
          trace.audit.examples.push_back(
              absl::StrCat(store.user_id(), " round ", round));
        }
      }
      const std::string inbound = server.HandleSerialized(outbound);
      FEDREC_ASSIGN_OR_RETURN(const RecallResponse response,
                              ParseResponse(inbound));
      FEDREC_ASSIGN_OR_RETURN(
          const DisplayOutcome shown,
          RankAndDisplay(store, response, models, options.display,
                         options.exclude_history));
      Rng click_rng(DeriveSeed(options.seed, {Tag(StreamTag::kClicks), r, u}));
      std::vector<std::string> clicked;
      for (const std::string& id : shown.news_ids) {
        if (clicks(static_cast<int>(u), id, click_rng)) clicked.push_back(id);
      }
      for (const std::string& id : clicked) store.RecordClick(id);

      std::string line = absl::StrCat(
          "{\"round\":", round, ",\"user\":", nlohmann::json(store.user_id()).dump(),
          ",\"history_before\":", history_before,
          ",\"history_after\":", store.history().size(),
          ",\"request\":", outbound, ",\"response\":", inbound,
          ",\"displayed\":", JsonList(shown.news_ids),
          ",\"clicked\":", JsonList(clicked), "}");
      trace.hash = Fnv1a(line, trace.hash);
      trace.hash = Fnv1a("\n", trace.hash);
      trace.lines.push_back(std::move(line));
    }
  }
  return trace;
}

}  // namespace fedrec::serving
