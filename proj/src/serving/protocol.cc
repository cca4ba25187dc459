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

#include "fedrec/serving/protocol.h"

#include <cmath>
#include <cstdlib>
#include <numeric>
#include <set>

#include "absl/strings/str_cat.h"
#include "absl/strings/str_format.h"
#include "absl/strings/str_join.h"
#include "json.hpp"

namespace fedrec::serving {
namespace {

using nlohmann::json;

std::string FormatWeight(double v) {
  if (std::abs(v) < 1e-99) v = 0;
  return absl::StrFormat("%.8e", v);
}

absl::Status CheckKeys(const json& object,
                       std::initializer_list<const char*> keys,
                       absl::string_view what) {
  if (!object.is_object()) {
    return absl::InvalidArgumentError(absl::StrCat(what, " is not an object"));
  }
  std::set<std::string> expected(keys.begin(), keys.end());
  for (const auto& item : object.items()) {
    if (!expected.contains(item.key())) {
      return absl::InvalidArgumentError(
          absl::StrCat(what, " has unexpected field '", item.key(), "'"));
    }
  }
  for (const char* key : keys) {
    if (!object.contains(key)) {
      return absl::InvalidArgumentError(
          absl::StrCat(what, " lacks field '", key, "'"));
    }
  }
  return absl::OkStatus();
}

absl::StatusOr<json> ParseJson(absl::string_view text) {
  json parsed = json::parse(text, nullptr, /*allow_exceptions=*/false);
  if (parsed.is_discarded()) {
    return absl::InvalidArgumentError("malformed JSON");
  }
  return parsed;
}

absl::StatusOr<int> GetInt(const json& value, absl::string_view what) {
  if (!value.is_number_integer()) {
    return absl::InvalidArgumentError(absl::StrCat(what, " must be an integer"));
  }
  return value.get<int>();
}

}  // namespace

nn::Matrix CanonicalWeights(const nn::Matrix& alpha) {
  nn::Matrix out(alpha.rows(), alpha.cols());
  for (Eigen::Index i = 0; i < alpha.size(); ++i) {
    out.data()[i] = std::strtod(FormatWeight(alpha.data()[i]).c_str(), nullptr);
  }
  return out;
}

std::string NewSessionId(Rng& rng) {
  return absl::StrFormat("%016x", rng.NextU64());
}

std::string SerializeRequest(const RecallRequest& request) {
  const int total =
      std::accumulate(request.quotas.begin(), request.quotas.end(), 0);
  const int width = static_cast<int>(absl::StrCat(total).size());
  std::string out = absl::StrCat("{\"protocol_version\":",
                                 request.protocol_version, ",\"session_id\":",
                                 json(request.session_id).dump(),
                                 ",\"quotas\":[");
  for (size_t i = 0; i < request.quotas.size(); ++i) {
    if (i > 0) out += ",";
    absl::StrAppend(&out, absl::StrFormat("%*d", width, request.quotas[i]));
  }
  out += "],\"alpha\":[";
  for (Eigen::Index r = 0; r < request.alpha.rows(); ++r) {
    if (r > 0) out += ",";
    out += "[";
    for (Eigen::Index c = 0; c < request.alpha.cols(); ++c) {
      if (c > 0) out += ",";
      out += FormatWeight(request.alpha(r, c));
    }
    out += "]";
  }
  out += "]}";
  return out;
}

absl::StatusOr<RecallRequest> ParseRequest(absl::string_view text) {
  absl::StatusOr<json> parsed = ParseJson(text);
  if (!parsed.ok()) return parsed.status();
  const json& j = *parsed;
  if (absl::Status s = CheckKeys(
          j, {"protocol_version", "session_id", "quotas", "alpha"}, "request");
      !s.ok()) {
    return s;
  }
  RecallRequest request;
  absl::StatusOr<int> version = GetInt(j["protocol_version"], "version");
  if (!version.ok()) return version.status();
  request.protocol_version = *version;
  if (!j["session_id"].is_string()) {
    return absl::InvalidArgumentError("session_id must be a string");
  }
  request.session_id = j["session_id"].get<std::string>();
  if (!j["quotas"].is_array() || !j["alpha"].is_array()) {
    return absl::InvalidArgumentError("quotas and alpha must be arrays");
  }
  for (const json& q : j["quotas"]) {
    absl::StatusOr<int> quota = GetInt(q, "quota");
    if (!quota.ok()) return quota.status();
    request.quotas.push_back(*quota);
  }
  const json& rows = j["alpha"];
  if (rows.size() != request.quotas.size()) {
    return absl::InvalidArgumentError(
        absl::StrCat("request has ", rows.size(), " weight rows and ",
                     request.quotas.size(), " quotas"));
  }
  const size_t cols = rows.empty() ? 0 : rows.front().size();
  request.alpha.resize(rows.size(), cols);
  for (size_t r = 0; r < rows.size(); ++r) {
    if (!rows[r].is_array() || rows[r].size() != cols) {
      return absl::InvalidArgumentError("ragged weight rows");
    }
    for (size_t c = 0; c < cols; ++c) {
      if (!rows[r][c].is_number()) {
        return absl::InvalidArgumentError("weights must be numbers");
      }
      request.alpha(r, c) = rows[r][c].get<double>();
    }
  }
  return request;
}

std::string SerializeResponse(const RecallResponse& response) {
  std::string out = absl::StrCat(
      "{\"protocol_version\":", response.protocol_version,
      ",\"session_id\":", json(response.session_id).dump(),
      ",\"error\":", json(response.error).dump(), ",\"candidates\":[");
  for (size_t i = 0; i < response.candidates.size(); ++i) {
    const Candidate& c = response.candidates[i];
    if (i > 0) out += ",";
    absl::StrAppend(&out, "{\"news_id\":", json(c.news_id).dump(),
                    ",\"title\":[", absl::StrJoin(c.title, ","), "]}");
  }
  out += "]}";
  return out;
}

absl::StatusOr<RecallResponse> ParseResponse(absl::string_view text) {
  absl::StatusOr<json> parsed = ParseJson(text);
  if (!parsed.ok()) return parsed.status();
  const json& j = *parsed;
  if (absl::Status s = CheckKeys(
          j, {"protocol_version", "session_id", "error", "candidates"},
          "response");
      !s.ok()) {
    return s;
  }
  RecallResponse response;
  absl::StatusOr<int> version = GetInt(j["protocol_version"], "version");
  if (!version.ok()) return version.status();
  response.protocol_version = *version;
  if (!j["session_id"].is_string() || !j["error"].is_string() ||
      !j["candidates"].is_array()) {
    return absl::InvalidArgumentError("malformed response fields");
  }
  response.session_id = j["session_id"].get<std::string>();
  response.error = j["error"].get<std::string>();
  for (const json& c : j["candidates"]) {
    if (absl::Status s = CheckKeys(c, {"news_id", "title"}, "candidate");
        !s.ok()) {
      return s;
    }
    if (!c["news_id"].is_string() || !c["title"].is_array()) {
      return absl::InvalidArgumentError("malformed candidate");
    }
    Candidate candidate;
    candidate.news_id = c["news_id"].get<std::string>();
    for (const json& t : c["title"]) {
      absl::StatusOr<int> token = GetInt(t, "token id");
      if (!token.ok()) return token.status();
      candidate.title.push_back(*token);
    }
    response.candidates.push_back(std::move(candidate));
  }
  return response;
}

}  // namespace fedrec::serving
