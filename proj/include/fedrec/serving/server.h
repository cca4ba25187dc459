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

#ifndef FEDREC_SERVING_SERVER_H_
#define FEDREC_SERVING_SERVER_H_

#include <string>
#include <vector>

#include "absl/status/status.h"
#include "absl/strings/string_view.h"
#include "fedrec/nn/tensor.h"
#include "fedrec/recall/recall_model.h"
#include "fedrec/serving/protocol.h"

namespace fedrec::serving {

// Tolerance on each weight row summing to one.
inline constexpr double kWeightSumTolerance = 1e-6;

absl::Status ValidateRequest(const RecallRequest& request, int num_bie);

// Stateless recall service over a fixed BIE bank and news pool. Handle() is
// a pure function of the request and safe to call concurrently.
class RecallServer {
 public:
  RecallServer(recall::BieBank bank, nn::Matrix news_reps,
               std::vector<std::string> news_ids,
               std::vector<std::vector<int>> titles);

  RecallResponse Handle(const RecallRequest& request) const;
  // Parses, handles and serializes; malformed input gets an error response.
  std::string HandleSerialized(absl::string_view request) const;

  const recall::BieBank& bank() const { return bank_; }
  int pool_size() const { return static_cast<int>(news_ids_.size()); }

 private:
  recall::BieBank bank_;
  nn::Matrix news_reps_;
  std::vector<std::string> news_ids_;
  std::vector<std::vector<int>> titles_;
};

}  // namespace fedrec::serving

#endif  // FEDREC_SERVING_SERVER_H_
