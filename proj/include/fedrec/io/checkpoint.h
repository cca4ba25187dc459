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

// JSON checkpoints. Parameter values round-trip exactly.
//
//   {"format":"fedrec-checkpoint","version":1,"kind":"recall",
//    "config":{...},"vocab":[...],
//    "params":{"recall/bie/keys":{"shape":[8,32],"data":[...]},...}}

#ifndef FEDREC_IO_CHECKPOINT_H_
#define FEDREC_IO_CHECKPOINT_H_

#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "absl/status/statusor.h"
#include "absl/strings/string_view.h"
#include "fedrec/nn/tensor.h"

namespace fedrec::io {

inline constexpr char kCheckpointFormat[] = "fedrec-checkpoint";
inline constexpr int kCheckpointVersion = 1;

struct Tensor {
  int rows = 0;
  int cols = 0;
  std::vector<double> data;
};

struct Checkpoint {
  std::string kind;         // "recall" or "ranking"
  std::string config_json;  // the run configuration, a JSON object
  std::vector<std::string> vocab;
  std::map<std::string, Tensor> params;
};

Checkpoint MakeCheckpoint(std::string kind, std::string config_json,
                          const nn::ParamList& params,
                          std::vector<std::string> vocab = {});

std::string SerializeCheckpoint(const Checkpoint& checkpoint);
absl::StatusOr<Checkpoint> ParseCheckpoint(absl::string_view text);

absl::Status WriteCheckpoint(const Checkpoint& checkpoint,
                             const std::filesystem::path& path);
absl::StatusOr<Checkpoint> ReadCheckpoint(const std::filesystem::path& path);

// Copies every tensor into the matching parameter. Fails when the kind
// differs, a name is missing on either side, or shapes disagree.
absl::Status RestoreParams(const Checkpoint& checkpoint,
                           absl::string_view expected_kind,
                           const nn::ParamList& params);

}  // namespace fedrec::io

#endif  // FEDREC_IO_CHECKPOINT_H_
