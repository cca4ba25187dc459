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

#include "fedrec/federated/federated.h"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numeric>

#include "absl/strings/str_cat.h"
#include "absl/strings/str_format.h"
#include "fedrec/base/status_macros.h"

namespace fedrec::federated {
namespace {

bool AllFinite(absl::Span<const double> v) {
  return std::all_of(v.begin(), v.end(),
                     [](double x) { return std::isfinite(x); });
}

// Behavior-weighted loss over `clients`, each evaluated with a fixed seed.
absl::StatusOr<double> MonitorLoss(const FederatedTask& task,
                                   absl::Span<const int> clients,
                                   absl::Span<const double> params,
                                   uint64_t seed) {
  double loss = 0;
  double weight = 0;
  for (int client : clients) {
    FEDREC_ASSIGN_OR_RETURN(
        const ClientResult result,
        task.ComputeClient(client, params,
                           DeriveSeed(seed, {Tag(StreamTag::kMonitor),
                                             static_cast<uint64_t>(client)}),
                           /*with_grads=*/false));
    loss += result.weight * result.loss;
    weight += result.weight;
  }
  return weight > 0 ? loss / weight : 0.0;
}

}  // namespace

absl::Status FedConfig::Validate() const {
  if (!(sample_ratio > 0 && sample_ratio <= 1)) {
    return absl::InvalidArgumentError("sample ratio must be in (0, 1]");
  }
  if (!(clip > 0)) return absl::InvalidArgumentError("clip must be > 0");
  if (!(noise >= 0)) {
    return absl::InvalidArgumentError("gradient noise must be >= 0");
  }
  if (!(learning_rate >= 0)) {
    return absl::InvalidArgumentError("learning rate must be >= 0");
  }
  if (max_rounds < 0) return absl::InvalidArgumentError("max rounds < 0");
  if (window < 0) return absl::InvalidArgumentError("window < 0");
  if (!(tolerance >= 0)) return absl::InvalidArgumentError("tolerance < 0");
  if (monitor_clients < 0) {
    return absl::InvalidArgumentError("monitor clients < 0");
  }
  return absl::OkStatus();
}

absl::StatusOr<std::vector<int>> SampleClients(absl::Span<const int> client_ids,
                                               double ratio, Rng& rng) {
  if (client_ids.empty()) return absl::InvalidArgumentError("no clients");
  if (!(ratio > 0 && ratio <= 1)) {
    return absl::InvalidArgumentError("sample ratio must be in (0, 1]");
  }
  const int n = static_cast<int>(client_ids.size());
  const int k = std::clamp(static_cast<int>(std::lround(ratio * n)), 1, n);
  std::vector<int> picks = rng.SampleWithoutReplacement(n, k);
  for (int& i : picks) i = client_ids[i];
  std::sort(picks.begin(), picks.end());
  return picks;
}

std::vector<double> ProtectGradients(absl::Span<const double> grads,
                                     double clip, double noise, Rng& rng) {
  std::vector<double> out(grads.size());
  for (size_t i = 0; i < grads.size(); ++i) {
    out[i] = std::clamp(grads[i], -clip, clip) + rng.Laplace(noise);
  }
  return out;
}

absl::StatusOr<std::vector<double>> Aggregate(
    std::vector<GradientUpdate> updates) {
  if (updates.empty()) return absl::InvalidArgumentError("no updates");
  std::sort(updates.begin(), updates.end(),
            [](const GradientUpdate& a, const GradientUpdate& b) {
              return a.client < b.client;
            });
  const size_t size = updates.front().grads.size();
  double total = 0;
  for (const GradientUpdate& u : updates) {
    if (u.grads.size() != size) {
      return absl::InvalidArgumentError(
          absl::StrCat("client ", u.client, " sent ", u.grads.size(),
                       " gradient entries, expected ", size));
    }
    if (!(u.weight > 0)) {
      return absl::InvalidArgumentError(
          absl::StrCat("client ", u.client, " has non-positive weight"));
    }
    total += u.weight;
  }
  std::vector<double> out(size, 0.0);
  for (const GradientUpdate& u : updates) {
    const double beta = u.weight / total;
    for (size_t i = 0; i < size; ++i) out[i] += beta * u.grads[i];
  }
  return out;
}

double L2Norm(absl::Span<const double> v) {
  return std::sqrt(std::inner_product(v.begin(), v.end(), v.begin(), 0.0));
}

std::string RoundLog::ToJson(bool include_timing) const {
  std::string out = absl::StrFormat(
      "{\"round\":%d,\"sampled\":%d,\"mean_loss\":%.17g,"
      "\"monitor_loss\":%.17g,\"grad_norm_pre\":%.17g,"
      "\"grad_norm_post\":%.17g",
      round, sampled, mean_loss, monitor_loss, grad_norm_pre, grad_norm_post);
  if (include_timing) absl::StrAppendFormat(&out, ",\"wall_ms\":%.3f", wall_ms);
  out += "}";
  return out;
}

bool HasConverged(absl::Span<const double> losses, int window,
                  double tolerance) {
  if (window <= 0) return false;
  const size_t w = static_cast<size_t>(window);
  if (losses.size() < 2 * w) return false;
  const auto end = losses.end();
  const double last = std::accumulate(end - w, end, 0.0) / w;
  const double previous = std::accumulate(end - 2 * w, end - w, 0.0) / w;
  if (previous == 0) return true;
  return (previous - last) / std::abs(previous) < tolerance;
}

absl::StatusOr<TrainResult> TrainFederated(const FederatedTask& task,
                                           std::vector<double> params,
                                           const FedConfig& config,
                                           const RoundCallback& on_round) {
  FEDREC_RETURN_IF_ERROR(config.Validate());
  if (params.size() != task.NumParams()) {
    return absl::InvalidArgumentError(
        absl::StrCat("parameter vector has ", params.size(),
                     " entries, task expects ", task.NumParams()));
  }
  std::vector<int> clients(task.NumClients());
  std::iota(clients.begin(), clients.end(), 0);
  if (clients.empty()) return absl::InvalidArgumentError("no clients");

  std::vector<int> monitor = clients;
  {
    Rng rng(DeriveSeed(config.seed, {Tag(StreamTag::kMonitor)}));
    rng.Shuffle(monitor);
    monitor.resize(std::min<size_t>(monitor.size(), config.monitor_clients));
    std::sort(monitor.begin(), monitor.end());
  }

  TrainResult result;
  std::vector<double> monitor_losses;
  for (int round = 0; round < config.max_rounds; ++round) {
    const auto start = std::chrono::steady_clock::now();
    const uint64_t r = static_cast<uint64_t>(round);
    Rng sampling(DeriveSeed(config.seed, {Tag(StreamTag::kSampling), r}));
    FEDREC_ASSIGN_OR_RETURN(
        const std::vector<int> sampled,
        SampleClients(clients, config.sample_ratio, sampling));

    std::vector<GradientUpdate> raw;
    std::vector<GradientUpdate> protected_updates;
    double weighted_loss = 0;
    double total_weight = 0;
    for (int client : sampled) {
      const uint64_t c = static_cast<uint64_t>(client);
      FEDREC_ASSIGN_OR_RETURN(
          ClientResult local,
          task.ComputeClient(
              client, params,
              DeriveSeed(config.seed, {Tag(StreamTag::kClientLoss), r, c}),
              /*with_grads=*/true));
      if (!std::isfinite(local.loss) || !AllFinite(local.grads)) {
        return absl::AbortedError(absl::StrCat(
            "training diverged at round ", round, ": client ", client,
            " produced a non-finite loss or gradient"));
      }
      Rng noise(DeriveSeed(config.seed, {Tag(StreamTag::kGradientNoise), r, c}));
      std::vector<double> protected_grads =
          ProtectGradients(local.grads, config.clip, config.noise, noise);
      weighted_loss += local.weight * local.loss;
      total_weight += local.weight;
      protected_updates.push_back(
          {client, std::move(protected_grads), local.weight});
      raw.push_back({client, std::move(local.grads), local.weight});
    }
    FEDREC_ASSIGN_OR_RETURN(const std::vector<double> raw_mean,
                            Aggregate(std::move(raw)));
    FEDREC_ASSIGN_OR_RETURN(const std::vector<double> update,
                            Aggregate(std::move(protected_updates)));
    for (size_t i = 0; i < params.size(); ++i) {
      params[i] -= config.learning_rate * update[i];
    }
    if (!AllFinite(params)) {
      return absl::AbortedError(absl::StrCat(
          "training diverged at round ", round, ": non-finite parameters"));
    }

    RoundLog log;
    log.round = round;
    log.sampled = static_cast<int>(sampled.size());
    log.mean_loss = weighted_loss / total_weight;
    log.grad_norm_pre = L2Norm(raw_mean);
    log.grad_norm_post = L2Norm(update);
    if (monitor.empty()) {
      log.monitor_loss = log.mean_loss;
    } else {
      FEDREC_ASSIGN_OR_RETURN(log.monitor_loss,
                              MonitorLoss(task, monitor, params, config.seed));
    }
    if (!std::isfinite(log.monitor_loss)) {
      return absl::AbortedError(absl::StrCat("training diverged at round ",
                                             round, ": non-finite loss"));
    }
    log.wall_ms = std::chrono::duration<double, std::milli>(
                      std::chrono::steady_clock::now() - start)
                      .count();
    monitor_losses.push_back(log.monitor_loss);
    result.rounds.push_back(log);
    if (on_round) on_round(log);
    if (HasConverged(monitor_losses, config.window, config.tolerance)) {
      result.converged = true;
      break;
    }
  }
  result.params = std::move(params);
  return result;
}

}  // namespace fedrec::federated
