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

#include "fedrec/metrics/metrics.h"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <unordered_set>

#include "absl/strings/str_cat.h"
#include "absl/strings/str_format.h"
#include "absl/strings/str_join.h"
#include "json.hpp"

namespace fedrec::metrics {

RecallResult RecallAtK(const std::vector<std::vector<int>>& targets,
                       const std::vector<std::vector<int>>& recalled, int k) {
  RecallResult result;
  double sum = 0;
  for (size_t u = 0; u < targets.size(); ++u) {
    const std::unordered_set<int> target(targets[u].begin(), targets[u].end());
    if (target.empty()) {
      ++result.excluded;
      continue;
    }
    std::unordered_set<int> hits;
    if (u < recalled.size()) {
      const size_t n = std::min<size_t>(std::max(k, 0), recalled[u].size());
      for (size_t i = 0; i < n; ++i) {
        if (target.contains(recalled[u][i])) hits.insert(recalled[u][i]);
      }
    }
    sum += static_cast<double>(hits.size()) / target.size();
    ++result.users;
  }
  if (result.users > 0) result.percent = 100.0 * sum / result.users;
  return result;
}

RecallResult HistoryRecallRate(const std::vector<std::vector<int>>& histories,
                               const std::vector<std::vector<int>>& recalled,
                               int k) {
  return RecallAtK(histories, recalled, k);
}

std::vector<int> RankOrder(absl::Span<const double> scores) {
  std::vector<int> order(scores.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](int a, int b) { return scores[a] > scores[b]; });
  return order;
}

std::optional<double> Auc(absl::Span<const double> scores,
                          absl::Span<const int> labels, TiePolicy ties) {
  if (scores.size() != labels.size()) return std::nullopt;
  std::vector<double> pos, neg;
  for (size_t i = 0; i < scores.size(); ++i) {
    (labels[i] ? pos : neg).push_back(scores[i]);
  }
  if (pos.empty() || neg.empty()) return std::nullopt;
  std::sort(neg.begin(), neg.end());
  // Count in half units: 2 per won pair, 1 per tie under kHalf.
  int64_t units = 0;
  for (double p : pos) {
    const auto lower = std::lower_bound(neg.begin(), neg.end(), p);
    const auto upper = std::upper_bound(lower, neg.end(), p);
    units += 2 * (lower - neg.begin());
    if (ties == TiePolicy::kHalf) units += upper - lower;
  }
  return static_cast<double>(units) /
         (2.0 * static_cast<double>(pos.size()) * neg.size());
}

std::optional<double> Mrr(absl::Span<const double> scores,
                          absl::Span<const int> labels) {
  if (scores.size() != labels.size()) return std::nullopt;
  const std::vector<int> order = RankOrder(scores);
  double sum = 0;
  int positives = 0;
  for (size_t r = 0; r < order.size(); ++r) {
    if (labels[order[r]]) {
      sum += 1.0 / static_cast<double>(r + 1);
      ++positives;
    }
  }
  if (positives == 0) return std::nullopt;
  return sum / positives;
}

std::optional<double> NdcgAtK(absl::Span<const double> scores,
                              absl::Span<const int> labels, int k) {
  if (scores.size() != labels.size()) return std::nullopt;
  const int positives =
      static_cast<int>(std::count_if(labels.begin(), labels.end(),
                                     [](int y) { return y != 0; }));
  if (positives == 0) return std::nullopt;
  const std::vector<int> order = RankOrder(scores);
  const size_t cut = std::min<size_t>(std::max(k, 0), order.size());
  double dcg = 0;
  for (size_t i = 0; i < cut; ++i) {
    const double gain = std::exp2(labels[order[i]]) - 1.0;
    dcg += gain / std::log2(static_cast<double>(i + 2));
  }
  double ideal = 0;
  for (int i = 0; i < positives; ++i) {
    ideal += 1.0 / std::log2(static_cast<double>(i + 2));
  }
  return dcg / ideal;
}

ImpressionMetrics EvaluateImpressions(
    const std::vector<ScoredImpression>& impressions, TiePolicy ties) {
  ImpressionMetrics m;
  double auc = 0, mrr = 0, ndcg5 = 0, ndcg10 = 0;
  for (const ScoredImpression& imp : impressions) {
    if (std::optional<double> a = Auc(imp.scores, imp.labels, ties)) {
      auc += *a;
      ++m.auc_evaluated;
    }
    const std::optional<double> r = Mrr(imp.scores, imp.labels);
    if (!r.has_value()) {
      ++m.excluded;
      continue;
    }
    mrr += *r;
    ndcg5 += *NdcgAtK(imp.scores, imp.labels, 5);
    ndcg10 += *NdcgAtK(imp.scores, imp.labels, 10);
    ++m.evaluated;
  }
  if (m.auc_evaluated > 0) m.auc = auc / m.auc_evaluated;
  if (m.evaluated > 0) {
    m.mrr = mrr / m.evaluated;
    m.ndcg5 = ndcg5 / m.evaluated;
    m.ndcg10 = ndcg10 / m.evaluated;
  }
  return m;
}

void Report::Add(std::string name, double value) {
  fields_.emplace_back(std::move(name),
                       std::isfinite(value) ? absl::StrFormat("%.17g", value)
                                            : std::string("null"));
}

void Report::Add(std::string name, std::string value) {
  fields_.emplace_back(std::move(name), nlohmann::json(value).dump());
}

std::string Report::ToJson() const {
  return absl::StrCat(
      "{",
      absl::StrJoin(fields_, ",",
                    [](std::string* out, const auto& field) {
                      absl::StrAppend(out, nlohmann::json(field.first).dump(),
                                      ":", field.second);
                    }),
      "}");
}

std::string Report::CsvHeader() const {
  return absl::StrJoin(fields_, ",", [](std::string* out, const auto& field) {
    absl::StrAppend(out, field.first);
  });
}

std::string Report::CsvRow() const {
  return absl::StrJoin(fields_, ",", [](std::string* out, const auto& field) {
    std::string value = field.second;
    if (!value.empty() && value.front() == '"') {
      value = nlohmann::json::parse(value).get<std::string>();
      if (value.find_first_of(",\"\n") != std::string::npos) {
        std::string quoted = "\"";
        for (char c : value) {
          if (c == '"') quoted.push_back('"');
          quoted.push_back(c);
        }
        value = quoted + "\"";
      }
    }
    absl::StrAppend(out, value);
  });
}

}  // namespace fedrec::metrics
