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

#include "fedrec/io/checkpoint.h"

#include <fstream>
#include <sstream>

#include "absl/strings/str_cat.h"
#include "json.hpp"

namespace fedrec::io {

using nlohmann::json;
using nlohmann::ordered_json;

Checkpoint MakeCheckpoint(std::string kind, std::string config_json,
                          const nn::ParamList& params,
                          std::vector<std::string> vocab) {
  Checkpoint checkpoint;
  checkpoint.kind = std::move(kind);
  checkpoint.config_json = std::move(config_json);
  checkpoint.vocab = std::move(vocab);
  for (const nn::ParamView& p : params) {
    checkpoint.params[p.name] =
        Tensor{p.rows, p.cols,
               std::vector<double>(p.data, p.data + p.size())};
  }
  return checkpoint;
}

std::string SerializeCheckpoint(const Checkpoint& checkpoint) {
  ordered_json out;
  out["format"] = kCheckpointFormat;
  out["version"] = kCheckpointVersion;
  out["kind"] = checkpoint.kind;
  out["config"] = checkpoint.config_json.empty()
                      ? ordered_json::object()
                      : ordered_json::parse(checkpoint.config_json);
  out["vocab"] = checkpoint.vocab;
  ordered_json params = ordered_json::object();
  for (const auto& [name, tensor] : checkpoint.params) {
    params[name] = {{"shape", {tensor.rows, tensor.cols}},
                    {"data", tensor.data}};
  }
  out["params"] = std::move(params);
  return out.dump() + "\n";
}

absl::StatusOr<Checkpoint> ParseCheckpoint(absl::string_view text) {
  const json in = json::parse(text, nullptr, /*allow_exceptions=*/false);
  if (in.is_discarded() || !in.is_object()) {
    return absl::InvalidArgumentError("checkpoint is not a JSON object");
  }
  if (in.value("format", "") != kCheckpointFormat) {
    return absl::InvalidArgumentError("not a fedrec checkpoint");
  }
  if (in.value("version", 0) != kCheckpointVersion) {
    return absl::InvalidArgumentError("unsupported checkpoint version");
  }
  try {
    Checkpoint checkpoint;
    checkpoint.kind = in.at("kind").get<std::string>();
    checkpoint.config_json = in.at("config").dump();
    checkpoint.vocab = in.at("vocab").get<std::vector<std::string>>();
    for (const auto& [name, value] : in.at("params").items()) {
      Tensor tensor;
      const json& shape = value.at("shape");
      tensor.rows = shape.at(0).get<int>();
      tensor.cols = shape.at(1).get<int>();
      tensor.data = value.at("data").get<std::vector<double>>();
      if (tensor.rows < 0 || tensor.cols < 0 ||
          tensor.data.size() !=
              static_cast<size_t>(tensor.rows) * tensor.cols) {
        return absl::InvalidArgumentError(
            absl::StrCat("tensor ", name, " does not match its shape"));
      }
      checkpoint.params[name] = std::move(tensor);
    }
    return checkpoint;
  } catch (const json::exception& e) {
    return absl::InvalidArgumentError(
        absl::StrCat("malformed checkpoint: ", e.what()));
  }
}

absl::Status WriteCheckpoint(const Checkpoint& checkpoint,
                             const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) return absl::InternalError(absl::StrCat("cannot write ", path.string()));
  out << SerializeCheckpoint(checkpoint);
  out.close();
  if (!out) return absl::InternalError(absl::StrCat("cannot write ", path.string()));
  return absl::OkStatus();
}

absl::StatusOr<Checkpoint> ReadCheckpoint(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    return absl::NotFoundError(
        absl::StrCat("cannot open checkpoint ", path.string()));
  }
  std::stringstream buffer;
  buffer << in.rdbuf();
  absl::StatusOr<Checkpoint> checkpoint = ParseCheckpoint(buffer.str());
  if (!checkpoint.ok()) {
    return absl::Status(checkpoint.status().code(),
                        absl::StrCat(path.string(), ": ",
                                     checkpoint.status().message()));
  }
  return checkpoint;
}

absl::Status RestoreParams(const Checkpoint& checkpoint,
                           absl::string_view expected_kind,
                           const nn::ParamList& params) {
  if (checkpoint.kind != expected_kind) {
    return absl::InvalidArgumentError(absl::StrCat(
        "expected a ", expected_kind, " checkpoint, found ", checkpoint.kind));
  }
  if (checkpoint.params.size() != params.size()) {
    return absl::InvalidArgumentError(
        absl::StrCat("checkpoint holds ", checkpoint.params.size(),
                     " tensors, the model has ", params.size()));
  }
  for (const nn::ParamView& p : params) {
    auto it = checkpoint.params.find(p.name);
    if (it == checkpoint.params.end()) {
      return absl::InvalidArgumentError(
          absl::StrCat("checkpoint lacks tensor ", p.name));
    }
    const Tensor& t = it->second;
    if (t.rows != p.rows || t.cols != p.cols) {
      return absl::InvalidArgumentError(absl::StrCat(
          "tensor ", p.name, " has shape ", t.rows, "x", t.cols,
          " in the checkpoint but ", p.rows, "x", p.cols,
          " in the model; check the model dimensions"));
    }
    std::copy(t.data.begin(), t.data.end(), p.data);
  }
  return absl::OkStatus();
}

}  // namespace fedrec::io
