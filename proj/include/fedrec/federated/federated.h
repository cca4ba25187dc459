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

// Federated SGD with per-client gradient clipping and Laplace perturbation.
// Each round samples clients, computes local gradients against a fixed
// parameter snapshot, protects them, aggregates them weighted by behavior
// counts and takes one SGD step.

#ifndef FEDREC_FEDERATED_FEDERATED_H_
#define FEDREC_FEDERATED_FEDERATED_H_

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "absl/status/statusor.h"
#include "absl/types/span.h"
#include "fedrec/base/random.h"

namespace fedrec::federated {

struct FedConfig {
  double sample_ratio = 0.02;  // r
  double clip = 0.1;           // theta
  double noise = 0.01;         // lambda_g
  double learning_rate = 0.05;
  int max_rounds = 300;
  // Training stops once the mean monitor loss of the last `window` rounds
  // improves on the previous `window` rounds by less than `tolerance`
  // (relative). 0 disables the check.
  int window = 20;
  double tolerance = 1e-3;
  // Size of the fixed client subset whose loss is tracked every round with
  // fixed per-client seeds, so the curve reflects parameter changes only.
  // With 0 the sampled clients' loss is tracked instead.
  int monitor_clients = 64;
  uint64_t seed = 0;

  absl::Status Validate() const;
};

struct GradientUpdate {
  int client = 0;
  std::vector<double> grads;
  double weight = 0;  // |B_u|
};

// Uniform sample without replacement of max(1, round(ratio * N)) ids,
// returned in ascending order.
absl::StatusOr<std::vector<int>> SampleClients(absl::Span<const int> client_ids,
                                               double ratio, Rng& rng);

// Per-component clamp to [-clip, clip] plus i.i.d. Laplace(0, noise).
std::vector<double> ProtectGradients(absl::Span<const double> grads,
                                     double clip, double noise, Rng& rng);

// sum_u beta_u G_u with beta_u = w_u / sum_v w_v, reduced in ascending client
// order whatever the input order.
absl::StatusOr<std::vector<double>> Aggregate(
    std::vector<GradientUpdate> updates);

double L2Norm(absl::Span<const double> v);

struct ClientResult {
  double loss = 0;
  std::vector<double> grads;  // empty when not requested
  double weight = 0;
};

// A model plus client data that the trainer can optimize. Implementations
// must be safe to call concurrently on distinct clients.
class FederatedTask {
 public:
  virtual ~FederatedTask() = default;

  virtual int NumClients() const = 0;
  virtual size_t NumParams() const = 0;
  // Loss and (if `with_grads`) gradient of client `client`'s local objective
  // at `params`. All randomness must derive from `seed`.
  virtual absl::StatusOr<ClientResult> ComputeClient(
      int client, absl::Span<const double> params, uint64_t seed,
      bool with_grads) const = 0;
};

struct RoundLog {
  int round = 0;
  int sampled = 0;
  double mean_loss = 0;  // behavior-weighted over sampled clients
  double monitor_loss = 0;
  double grad_norm_pre = 0;   // L2 of the aggregate of raw gradients
  double grad_norm_post = 0;  // L2 of the applied aggregate
  double wall_ms = 0;

  // Timing is left out by default so that logs are reproducible.
  std::string ToJson(bool include_timing = false) const;
};

struct TrainResult {
  std::vector<double> params;
  std::vector<RoundLog> rounds;
  bool converged = false;
};

using RoundCallback = std::function<void(const RoundLog&)>;

// Runs rounds until max_rounds or convergence. A non-finite loss, gradient or
// parameter aborts with kAborted naming the round.
absl::StatusOr<TrainResult> TrainFederated(const FederatedTask& task,
                                           std::vector<double> params,
                                           const FedConfig& config,
                                           const RoundCallback& on_round = {});

// Mean-window convergence test over a loss history.
bool HasConverged(absl::Span<const double> losses, int window,
                  double tolerance);

}  // namespace fedrec::federated

#endif  // FEDREC_FEDERATED_FEDERATED_H_
