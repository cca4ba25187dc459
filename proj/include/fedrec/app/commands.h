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

// Subcommands of the fedrec tool. Each one is a function of the run
// configuration and its input files, and echoes the configuration into its
// output directory.

#ifndef FEDREC_APP_COMMANDS_H_
#define FEDREC_APP_COMMANDS_H_

#include <filesystem>
#include <iosfwd>
#include <string>

#include "absl/status/status.h"
#include "fedrec/app/config.h"

namespace fedrec::app {

enum ExitCode {
  kExitOk = 0,
  kExitUsage = 1,
  kExitData = 2,
  kExitNumerical = 3,
};

// Output file names.
inline constexpr char kConfigFile[] = "config.json";
inline constexpr char kRankingCheckpointFile[] = "ranking.ckpt.json";
inline constexpr char kRecallCheckpointFile[] = "recall.ckpt.json";
inline constexpr char kRankingRoundsFile[] = "ranking_rounds.jsonl";
inline constexpr char kRecallRoundsFile[] = "recall_rounds.jsonl";
inline constexpr char kPrivacyFile[] = "privacy.json";
inline constexpr char kMetricsJsonFile[] = "metrics.json";
inline constexpr char kMetricsCsvFile[] = "metrics.csv";
inline constexpr char kTraceFile[] = "trace.jsonl";
inline constexpr char kAuditFile[] = "audit.json";

struct CommandOptions {
  std::filesystem::path out;
  bool force = false;
  std::filesystem::path recall_checkpoint;
  std::filesystem::path ranking_checkpoint;
  bool baseline_mean_pool = false;
  // Progress lines; may be null.
  std::ostream* log = nullptr;
};

absl::Status CmdGenData(const RunConfig& config, const CommandOptions& options);
absl::Status CmdTrainRank(const RunConfig& config, const CommandOptions& options);
absl::Status CmdTrainRecall(const RunConfig& config,
                            const CommandOptions& options);
absl::Status CmdEval(const RunConfig& config, const CommandOptions& options);
absl::Status CmdServeSim(const RunConfig& config, const CommandOptions& options);

// kAborted means a numerical failure; everything else is a data error.
int ExitCodeFor(const absl::Status& status);

// Parses the command line, runs the chosen command and returns its exit
// code.
int RunCli(int argc, char** argv, std::ostream& out, std::ostream& err);

}  // namespace fedrec::app

#endif  // FEDREC_APP_COMMANDS_H_
