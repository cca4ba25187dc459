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

#include "fedrec/serving/server.h"

#include <cmath>

#include "absl/strings/str_cat.h"

namespace fedrec::serving {

absl::Status ValidateRequest(const RecallRequest& request, int num_bie) {
  if (request.protocol_version != kProtocolVersion) {
    return absl::InvalidArgumentError(
        absl::StrCat("unsupported protocol version ", request.protocol_version));
  }
  if (request.alpha.rows() == 0) {
    return absl::InvalidArgumentError("request has no interest channels");
  }
  if (request.alpha.cols() != num_bie) {
    return absl::InvalidArgumentError(
        absl::StrCat("weight rows have ", request.alpha.cols(),
                     " entries, the bank has ", num_bie));
  }
  if (request.quotas.size() != static_cast<size_t>(request.alpha.rows())) {
    return absl::InvalidArgumentError("one quota per channel is required");
  }
  for (int q : request.quotas) {
    if (q < 0) return absl::InvalidArgumentError("negative quota");
  }
  for (Eigen::Index r = 0; r < request.alpha.rows(); ++r) {
    double sum = 0;
    for (Eigen::Index c = 0; c < request.alpha.cols(); ++c) {
      const double a = request.alpha(r, c);
      if (!std::isfinite(a) || a < 0) {
        return absl::InvalidArgumentError(
            absl::StrCat("weight row ", r, " has an invalid entry"));
      }
      sum += a;
    }
    if (std::abs(sum - 1.0) > kWeightSumTolerance) {
      return absl::InvalidArgumentError(
          absl::StrCat("weight row ", r, " sums to ", sum));
    }
  }
  return absl::OkStatus();
}

RecallServer::RecallServer(recall::BieBank bank, nn::Matrix news_reps,
                           std::vector<std::string> news_ids,
                           std::vector<std::vector<int>> titles)
    : bank_(std::move(bank)),
      news_reps_(std::move(news_reps)),
      news_ids_(std::move(news_ids)),
      titles_(std::move(titles)) {}

RecallResponse RecallServer::Handle(const RecallRequest& request) const {
  RecallResponse response;
  response.session_id = request.session_id;
  if (absl::Status s = ValidateRequest(request, bank_.size()); !s.ok()) {
    response.error = std::string(s.message());
    return response;
  }
  recall::ProtectedQuery query;
  query.alpha = request.alpha;
  query.quotas = request.quotas;
  absl::StatusOr<std::vector<int>> recalled =
      recall::RecallCandidates(query, bank_, news_reps_);
  if (!recalled.ok()) {
    response.error = std::string(recalled.status().message());
    return response;
  }
  for (int n : *recalled) {
    response.candidates.push_back({news_ids_[n], titles_[n]});
  }
  return response;
}

std::string RecallServer::HandleSerialized(absl::string_view request) const {
  absl::StatusOr<RecallRequest> parsed = ParseRequest(request);
  if (!parsed.ok()) {
    RecallResponse error;
    error.error = std::string(parsed.status().message());
    return SerializeResponse(error);
  }
  return SerializeResponse(Handle(*parsed));
}

}  // namespace fedrec::serving
