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

// Index-based view of a parsed dataset: news rows, tokenized titles and
// per-user histories and impressions split by time.

#ifndef FEDREC_DATA_CORPUS_H_
#define FEDREC_DATA_CORPUS_H_

#include <cstdint>
#include <filesystem>
#include <string>
#include <unordered_map>
#include <vector>

#include "absl/status/statusor.h"
#include "fedrec/data/dataset.h"
#include "fedrec/ranking/ranking_model.h"
#include "fedrec/ranking/vocab.h"
#include "fedrec/recall/recall_model.h"

namespace fedrec::data {

struct IndexedImpression {
  int64_t timestamp = 0;
  std::vector<int> clicked;
  std::vector<int> unclicked;
};

struct UserRecord {
  std::string id;
  // Clicks known before training (the logged history plus clicks in the
  // history segment), most recent last, at most kMaxHistory.
  std::vector<int> train_history;
  // train_history extended with training-segment clicks; the history used
  // when serving held-out impressions.
  std::vector<int> eval_history;
  std::vector<IndexedImpression> train;
  std::vector<IndexedImpression> eval;

  std::vector<int> TrainClicks() const;
  std::vector<int> EvalClicks() const;  // sorted, distinct
};

struct Corpus {
  std::vector<std::string> news_ids;
  std::unordered_map<std::string, int> news_index;
  ranking::Vocab vocab;
  std::vector<std::vector<int>> titles;  // token ids per news
  std::vector<UserRecord> users;         // in order of first appearance
  int unknown_news = 0;  // references to ids missing from the news table

  int num_news() const { return static_cast<int>(news_ids.size()); }
};

// The vocabulary is grown only from titles referenced by history or training
// data; other titles map unseen words to the UNK id.
absl::StatusOr<Corpus> BuildCorpus(const std::vector<NewsArticle>& news,
                                   const std::vector<Impression>& behaviors,
                                   const SplitBoundaries& splits);

// Reads news.tsv and behaviors.tsv from `dir`.
absl::StatusOr<Corpus> LoadCorpus(const std::filesystem::path& dir,
                                  const SplitBoundaries& splits,
                                  const ParseOptions& options = {},
                                  ParseStats* stats = nullptr);

// Training data views. Recall negatives pool every displayed-but-unclicked
// training item of the user; ranking negatives stay impression-local.
recall::RecallExample MakeRecallExample(const UserRecord& user);
ranking::RankingExample MakeRankingExample(const UserRecord& user);

}  // namespace fedrec::data

#endif  // FEDREC_DATA_CORPUS_H_
