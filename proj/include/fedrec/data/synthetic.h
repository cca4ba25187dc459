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

// Seeded synthetic news logs with planted multi-topic interests.
//
// Every news item belongs to one topic and one subtopic of it, and carries a
// planted vector: topic centroid + subtopic offset + item noise. Titles mix
// topic words with common filler words. Each user follows `topics_per_user`
// topics and, within each, prefers one subtopic. Clicks are drawn from the
// followed topics, from the preferred subtopic with probability
// `subtopic_focus`.

#ifndef FEDREC_DATA_SYNTHETIC_H_
#define FEDREC_DATA_SYNTHETIC_H_

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "absl/status/statusor.h"
#include "fedrec/data/dataset.h"
#include "fedrec/nn/tensor.h"

namespace fedrec::data {

// Fixed calendar of the synthetic logs; the default split boundaries.
inline constexpr char kDefaultTrainStart[] = "11/15/2019 12:00:00 AM";
inline constexpr char kDefaultEvalStart[] = "11/20/2019 12:00:00 AM";

struct SyntheticSpec {
  int users = 200;
  int news = 500;
  int topics = 10;
  int subtopics = 4;  // per topic
  int topics_per_user = 3;
  int clicks_per_user = 20;       // history length
  int train_impressions = 6;      // per user
  int eval_impressions = 4;       // per user
  int impression_size = 10;
  double in_topic_fraction = 0.5;  // displayed items from followed topics
  double p_click = 0.7;            // click rate of followed-topic items
  double subtopic_focus = 0.8;
  int dim = 32;
  double topic_scale = 0.5;     // per-coordinate std of topic centroids
  double subtopic_scale = 0.3;  // ... of subtopic offsets
  double item_scale = 0.05;     // ... of item noise
  int words_per_topic = 20;
  int common_words = 50;
  int title_length = 8;
  double topic_word_rate = 0.7;
  uint64_t seed = 1;

  absl::Status Validate() const;
};

struct SyntheticData {
  std::vector<NewsArticle> news;
  std::vector<Impression> behaviors;
  std::vector<int> news_topic;     // per news
  std::vector<int> news_subtopic;  // per news, within its topic
  nn::Matrix news_vectors;         // news x dim
  std::vector<std::string> user_ids;
  std::vector<std::vector<int>> user_topics;
};

absl::StatusOr<SyntheticData> GenerateSynthetic(const SyntheticSpec& spec);

// Files written into `dir`.
inline constexpr char kNewsFile[] = "news.tsv";
inline constexpr char kBehaviorsFile[] = "behaviors.tsv";
inline constexpr char kNewsTruthFile[] = "truth_news.tsv";
inline constexpr char kUserTruthFile[] = "truth_users.tsv";

absl::Status WriteSynthetic(const SyntheticData& data,
                            const std::filesystem::path& dir);

// Planted labels and vectors read back from the truth files.
struct SyntheticTruth {
  std::vector<std::string> news_ids;
  std::vector<int> news_topic;
  std::vector<int> news_subtopic;
  nn::Matrix news_vectors;
  std::vector<std::string> user_ids;
  std::vector<std::vector<int>> user_topics;
};

absl::StatusOr<SyntheticTruth> ReadSyntheticTruth(
    const std::filesystem::path& dir);

}  // namespace fedrec::data

#endif  // FEDREC_DATA_SYNTHETIC_H_
