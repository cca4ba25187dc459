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

// Readers and writers for the MIND tab-separated layout.
//
//   news.tsv:      id, category, subcategory, title, abstract, url,
//                  title entities, abstract entities
//   behaviors.tsv: impression id, user id, time, history (space separated
//                  news ids), impressions (space separated "newsid-label")

#ifndef FEDREC_DATA_DATASET_H_
#define FEDREC_DATA_DATASET_H_

#include <cstdint>
#include <istream>
#include <ostream>
#include <string>
#include <vector>

#include "absl/status/statusor.h"
#include "absl/strings/string_view.h"
#include "fedrec/base/random.h"

namespace fedrec::data {

inline constexpr int kMaxHistory = 50;

struct NewsArticle {
  std::string id;
  std::string category;
  std::string subcategory;
  std::string title;
  std::string abstract;
  std::string url;
  std::string title_entities;
  std::string abstract_entities;

  friend bool operator==(const NewsArticle&, const NewsArticle&) = default;
};

struct DisplayedItem {
  std::string news_id;
  int clicked = 0;

  friend bool operator==(const DisplayedItem&, const DisplayedItem&) = default;
};

struct Impression {
  std::string impression_id;
  std::string user_id;
  std::string time;       // as written, "11/15/2019 8:55:22 AM"
  int64_t timestamp = 0;  // seconds since the Unix epoch, UTC
  std::vector<std::string> history;  // at most kMaxHistory, oldest first
  std::vector<DisplayedItem> displayed;

  friend bool operator==(const Impression&, const Impression&) = default;
};

struct ParseOptions {
  // Skip malformed lines (counting them) instead of failing.
  bool continue_on_error = false;
};

struct ParseStats {
  int lines = 0;
  int skipped = 0;
  std::vector<std::string> errors;  // first few skip reasons
};

// Fails on a duplicate news id or a line with fewer than 4 fields.
absl::StatusOr<std::vector<NewsArticle>> ParseNews(std::istream& in);
void WriteNews(const std::vector<NewsArticle>& news, std::ostream& out);

absl::StatusOr<std::vector<Impression>> ParseBehaviors(
    std::istream& in, const ParseOptions& options = {},
    ParseStats* stats = nullptr);
void WriteBehaviors(const std::vector<Impression>& impressions,
                    std::ostream& out);

// "M/D/YYYY h:mm:ss AM|PM" <-> Unix seconds.
absl::StatusOr<int64_t> ParseTimestamp(absl::string_view text);
std::string FormatTimestamp(int64_t seconds);

enum class Split { kHistory, kTrain, kEval };

// Timestamps before `train_start` feed user histories, those before
// `eval_start` are training data and the rest is held out.
struct SplitBoundaries {
  int64_t train_start = 0;
  int64_t eval_start = 0;

  Split Of(int64_t timestamp) const {
    if (timestamp < train_start) return Split::kHistory;
    if (timestamp < eval_start) return Split::kTrain;
    return Split::kEval;
  }
};

// `k` ids drawn uniformly without replacement from the impression's
// non-clicked items. Fails when fewer than `k` exist.
absl::StatusOr<std::vector<std::string>> SampleNegatives(
    const Impression& impression, int k, Rng& rng);

}  // namespace fedrec::data

#endif  // FEDREC_DATA_DATASET_H_
