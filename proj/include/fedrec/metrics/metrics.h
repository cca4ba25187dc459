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

// Recall and ranking metrics. Impression-level metrics order items by score,
// descending, with ties broken by position in the impression.

#ifndef FEDREC_METRICS_METRICS_H_
#define FEDREC_METRICS_METRICS_H_

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "absl/types/span.h"

namespace fedrec::metrics {

struct RecallResult {
  double percent = 0;  // mean over evaluated users of |C ∩ R_K| / |C|, x100
  int users = 0;
  int excluded = 0;  // users with an empty target set
};

// `targets[u]` is user u's clicked set, `recalled[u]` their recall list, of
// which the first `k` entries count. Duplicates within a target set count
// once.
RecallResult RecallAtK(const std::vector<std::vector<int>>& targets,
                       const std::vector<std::vector<int>>& recalled, int k);

// RecallAtK against past clicks: how much of a user's history their query
// recalls. Lower means less exposure.
RecallResult HistoryRecallRate(const std::vector<std::vector<int>>& histories,
                               const std::vector<std::vector<int>>& recalled,
                               int k);

enum class TiePolicy {
  kStrict,  // a tied pair counts as a miss
  kHalf,    // a tied pair counts one half
};

// nullopt unless both classes are present.
std::optional<double> Auc(absl::Span<const double> scores,
                          absl::Span<const int> labels,
                          TiePolicy ties = TiePolicy::kStrict);

// nullopt without positives.
std::optional<double> Mrr(absl::Span<const double> scores,
                          absl::Span<const int> labels);

// The ideal discount sums over all positives of the impression. nullopt
// without positives.
std::optional<double> NdcgAtK(absl::Span<const double> scores,
                              absl::Span<const int> labels, int k);

// Item positions sorted by descending score, ties to the lower position.
std::vector<int> RankOrder(absl::Span<const double> scores);

struct ScoredImpression {
  std::vector<double> scores;
  std::vector<int> labels;
};

struct ImpressionMetrics {
  double auc = 0;
  double mrr = 0;
  double ndcg5 = 0;
  double ndcg10 = 0;
  int evaluated = 0;      // impressions with a positive (MRR, nDCG)
  int auc_evaluated = 0;  // impressions with both classes
  int excluded = 0;       // impressions without any positive
};

// Unweighted means over impressions.
ImpressionMetrics EvaluateImpressions(
    const std::vector<ScoredImpression>& impressions,
    TiePolicy ties = TiePolicy::kStrict);

// Ordered name/value pairs written as one flat JSON object or a CSV row.
class Report {
 public:
  void Add(std::string name, double value);
  void Add(std::string name, std::string value);

  std::string ToJson() const;
  std::string CsvHeader() const;
  std::string CsvRow() const;

 private:
  std::vector<std::pair<std::string, std::string>> fields_;  // JSON literals
};

}  // namespace fedrec::metrics

#endif  // FEDREC_METRICS_METRICS_H_
