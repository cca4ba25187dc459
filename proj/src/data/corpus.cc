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

#include "fedrec/data/corpus.h"

#include <algorithm>
#include <fstream>
#include <map>
#include <unordered_set>

#include "absl/strings/str_cat.h"
#include "fedrec/base/status_macros.h"
#include "fedrec/data/synthetic.h"

namespace fedrec::data {
namespace {

void AppendCapped(std::vector<int>& history, int news) {
  history.push_back(news);
  if (history.size() > kMaxHistory) history.erase(history.begin());
}

std::vector<int> SortedUnique(std::vector<int> v) {
  std::sort(v.begin(), v.end());
  v.erase(std::unique(v.begin(), v.end()), v.end());
  return v;
}

}  // namespace

std::vector<int> UserRecord::TrainClicks() const {
  std::vector<int> out;
  for (const IndexedImpression& imp : train) {
    out.insert(out.end(), imp.clicked.begin(), imp.clicked.end());
  }
  return out;
}

std::vector<int> UserRecord::EvalClicks() const {
  std::vector<int> out;
  for (const IndexedImpression& imp : eval) {
    out.insert(out.end(), imp.clicked.begin(), imp.clicked.end());
  }
  return SortedUnique(std::move(out));
}

absl::StatusOr<Corpus> BuildCorpus(const std::vector<NewsArticle>& news,
                                   const std::vector<Impression>& behaviors,
                                   const SplitBoundaries& splits) {
  if (splits.eval_start < splits.train_start) {
    return absl::InvalidArgumentError("eval split starts before training");
  }
  Corpus corpus;
  for (const NewsArticle& a : news) {
    if (!corpus.news_index.emplace(a.id, corpus.num_news()).second) {
      return absl::InvalidArgumentError(
          absl::StrCat("duplicate news id ", a.id));
    }
    corpus.news_ids.push_back(a.id);
  }
  auto lookup = [&](const std::string& id) {
    auto it = corpus.news_index.find(id);
    if (it == corpus.news_index.end()) {
      ++corpus.unknown_news;
      return -1;
    }
    return it->second;
  };

  // Group impressions by user, keeping file order within a user, then order
  // each user's impressions by time.
  std::map<std::string, int> user_slot;
  std::vector<std::vector<const Impression*>> grouped;
  for (const Impression& imp : behaviors) {
    auto [it, inserted] =
        user_slot.emplace(imp.user_id, static_cast<int>(grouped.size()));
    if (inserted) {
      grouped.emplace_back();
      corpus.users.emplace_back().id = imp.user_id;
    }
    grouped[it->second].push_back(&imp);
  }

  std::unordered_set<int> training_news;
  for (size_t u = 0; u < grouped.size(); ++u) {
    std::vector<const Impression*>& imps = grouped[u];
    std::stable_sort(imps.begin(), imps.end(),
                     [](const Impression* a, const Impression* b) {
                       return a->timestamp < b->timestamp;
                     });
    UserRecord& user = corpus.users[u];
    for (const std::string& id : imps.front()->history) {
      const int n = lookup(id);
      if (n >= 0) AppendCapped(user.train_history, n);
    }
    for (const Impression* imp : imps) {
      const Split split = splits.Of(imp->timestamp);
      IndexedImpression indexed;
      indexed.timestamp = imp->timestamp;
      for (const DisplayedItem& item : imp->displayed) {
        const int n = lookup(item.news_id);
        if (n < 0) continue;
        (item.clicked ? indexed.clicked : indexed.unclicked).push_back(n);
      }
      switch (split) {
        case Split::kHistory:
          for (int n : indexed.clicked) AppendCapped(user.train_history, n);
          for (int n : indexed.unclicked) training_news.insert(n);
          break;
        case Split::kTrain:
          for (int n : indexed.clicked) training_news.insert(n);
          for (int n : indexed.unclicked) training_news.insert(n);
          user.train.push_back(std::move(indexed));
          break;
        case Split::kEval:
          user.eval.push_back(std::move(indexed));
          break;
      }
    }
    user.eval_history = user.train_history;
    for (const IndexedImpression& imp : user.train) {
      for (int n : imp.clicked) AppendCapped(user.eval_history, n);
    }
    training_news.insert(user.train_history.begin(), user.train_history.end());
  }

  corpus.titles.resize(news.size());
  for (size_t n = 0; n < news.size(); ++n) {
    if (training_news.contains(static_cast<int>(n))) {
      corpus.titles[n] = corpus.vocab.Encode(news[n].title, /*grow=*/true);
    }
  }
  for (size_t n = 0; n < news.size(); ++n) {
    if (!training_news.contains(static_cast<int>(n))) {
      corpus.titles[n] = corpus.vocab.Encode(news[n].title, /*grow=*/false);
    }
  }
  return corpus;
}

absl::StatusOr<Corpus> LoadCorpus(const std::filesystem::path& dir,
                                  const SplitBoundaries& splits,
                                  const ParseOptions& options,
                                  ParseStats* stats) {
  std::ifstream news_in(dir / kNewsFile);
  if (!news_in) {
    return absl::NotFoundError(
        absl::StrCat("cannot open ", (dir / kNewsFile).string()));
  }
  std::ifstream behaviors_in(dir / kBehaviorsFile);
  if (!behaviors_in) {
    return absl::NotFoundError(
        absl::StrCat("cannot open ", (dir / kBehaviorsFile).string()));
  }
  FEDREC_ASSIGN_OR_RETURN(const std::vector<NewsArticle> news,
                          ParseNews(news_in));
  FEDREC_ASSIGN_OR_RETURN(const std::vector<Impression> behaviors,
                          ParseBehaviors(behaviors_in, options, stats));
  return BuildCorpus(news, behaviors, splits);
}

recall::RecallExample MakeRecallExample(const UserRecord& user) {
  recall::RecallExample example;
  example.history = user.train_history;
  example.positives = user.TrainClicks();
  const std::vector<int> clicked = SortedUnique(example.positives);
  std::vector<int> pool;
  for (const IndexedImpression& imp : user.train) {
    pool.insert(pool.end(), imp.unclicked.begin(), imp.unclicked.end());
  }
  for (int n : SortedUnique(std::move(pool))) {
    if (!std::binary_search(clicked.begin(), clicked.end(), n)) {
      example.negative_pool.push_back(n);
    }
  }
  return example;
}

ranking::RankingExample MakeRankingExample(const UserRecord& user) {
  ranking::RankingExample example;
  example.history = user.train_history;
  for (const IndexedImpression& imp : user.train) {
    example.impressions.push_back({imp.clicked, imp.unclicked});
  }
  return example;
}

}  // namespace fedrec::data
