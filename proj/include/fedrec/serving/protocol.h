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

// Messages exchanged between a client and the recall server.
//
// Request, version 1, fields in this order and no others:
//   {"protocol_version":1,"session_id":"<16 hex>","quotas":[q_1,...,q_C],
//    "alpha":[[a_11,...,a_1B],...,[a_C1,...,a_CB]]}
// Weights are written as %.8e (nine significant digits) and quotas are
// left-padded with spaces to the width of their sum, so the encoded size
// depends only on C, B and the recall total.
//
// Response, version 1:
//   {"protocol_version":1,"session_id":"...","error":"",
//    "candidates":[{"news_id":"N1","title":[5,9,2]},...]}
// A non-empty error means the request was rejected and carries no
// candidates.

#ifndef FEDREC_SERVING_PROTOCOL_H_
#define FEDREC_SERVING_PROTOCOL_H_

#include <string>
#include <vector>

#include "absl/status/statusor.h"
#include "absl/strings/string_view.h"
#include "fedrec/base/random.h"
#include "fedrec/nn/tensor.h"

namespace fedrec::serving {

inline constexpr int kProtocolVersion = 1;

struct RecallRequest {
  int protocol_version = kProtocolVersion;
  std::string session_id;
  std::vector<int> quotas;
  nn::Matrix alpha;  // C x B

  friend bool operator==(const RecallRequest& a, const RecallRequest& b) {
    return a.protocol_version == b.protocol_version &&
           a.session_id == b.session_id && a.quotas == b.quotas &&
           a.alpha.rows() == b.alpha.rows() &&
           a.alpha.cols() == b.alpha.cols() && a.alpha == b.alpha;
  }
};

struct Candidate {
  std::string news_id;
  std::vector<int> title;

  friend bool operator==(const Candidate&, const Candidate&) = default;
};

struct RecallResponse {
  int protocol_version = kProtocolVersion;
  std::string session_id;
  std::string error;
  std::vector<Candidate> candidates;

  friend bool operator==(const RecallResponse&,
                         const RecallResponse&) = default;
};

// Rounds every weight to the nine significant digits the wire carries, so
// that a canonical request survives serialization unchanged. Magnitudes
// below 1e-99 become 0.
nn::Matrix CanonicalWeights(const nn::Matrix& alpha);

std::string NewSessionId(Rng& rng);

std::string SerializeRequest(const RecallRequest& request);
// Rejects unknown or missing fields, ragged weight rows and a quota count
// that differs from the number of rows.
absl::StatusOr<RecallRequest> ParseRequest(absl::string_view text);

std::string SerializeResponse(const RecallResponse& response);
absl::StatusOr<RecallResponse> ParseResponse(absl::string_view text);

}  // namespace fedrec::serving

#endif  // FEDREC_SERVING_PROTOCOL_H_
