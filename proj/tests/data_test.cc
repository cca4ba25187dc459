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

#include <algorithm>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "absl/strings/str_cat.h"
#include "absl/strings/str_join.h"
#include "fedrec/base/random.h"
#include "fedrec/cluster/clustering.h"
#include "fedrec/data/corpus.h"
#include "fedrec/data/dataset.h"
#include "fedrec/data/synthetic.h"
#include "gtest/gtest.h"
#include "tests/support/fixtures.h"
#include "tests/support/oracles.h"

namespace fedrec::data {
namespace {

using Strings = std::vector<std::string>;

constexpr char kTime[] = "11/15/2019 8:55:22 AM";

absl::StatusOr<std::vector<Impression>> ParseText(
    const std::string& text, const ParseOptions& options = {},
    ParseStats* stats = nullptr) {
  std::istringstream in(text);
  return ParseBehaviors(in, options, stats);
}

TEST(ParseBehaviorsTest, HandTracedLine) {
  auto imps = ParseText(absl::StrCat("1\tU1\t", kTime, "\tN1\tN2-1 N3-0\n"));
  ASSERT_TRUE(imps.ok()) << imps.status();
  ASSERT_EQ(imps->size(), 1u);
  const Impression& imp = imps->front();
  EXPECT_EQ(imp.impression_id, "1");
  EXPECT_EQ(imp.user_id, "U1");
  EXPECT_EQ(imp.history, Strings{"N1"});
  EXPECT_EQ(imp.displayed,
            (std::vector<DisplayedItem>{{"N2", 1}, {"N3", 0}}));
  EXPECT_EQ(imp.timestamp, *ParseTimestamp(kTime));
}

TEST(ParseBehaviorsTest, EmptyHistoryAndCrlf) {
  auto imps = ParseText(absl::StrCat("7\tU2\t", kTime, "\t\tN4-0\r\n\n"));
  ASSERT_TRUE(imps.ok()) << imps.status();
  ASSERT_EQ(imps->size(), 1u);
  EXPECT_TRUE(imps->front().history.empty());
  EXPECT_EQ(imps->front().displayed.back().news_id, "N4");
}

TEST(ParseBehaviorsTest, HistoryKeepsTheMostRecentFifty) {
  Strings history;
  for (int i = 1; i <= 60; ++i) history.push_back(absl::StrCat("N", i));
  auto imps = ParseText(absl::StrCat("1\tU1\t", kTime, "\t",
                                     absl::StrJoin(history, " "), "\tN1-1\n"));
  ASSERT_TRUE(imps.ok());
  const Strings& got = imps->front().history;
  ASSERT_EQ(got.size(), 50u);
  EXPECT_EQ(got.front(), "N11");
  EXPECT_EQ(got.back(), "N60");
}

TEST(ParseBehaviorsTest, MalformedLabelNamesTheLine) {
  const std::string text =
      absl::StrCat("1\tU1\t", kTime, "\t\tN1-1\n", "2\tU1\t", kTime,
                   "\t\tN2-2\n", "3\tU1\t", kTime, "\t\tN3\n");
  auto strict = ParseText(text);
  ASSERT_FALSE(strict.ok());
  EXPECT_NE(strict.status().message().find("line 2"), std::string::npos)
      << strict.status();

  ParseStats stats;
  auto lenient = ParseText(text, ParseOptions{true}, &stats);
  ASSERT_TRUE(lenient.ok());
  EXPECT_EQ(lenient->size(), 1u);
  EXPECT_EQ(stats.lines, 3);
  EXPECT_EQ(stats.skipped, 2);
  ASSERT_EQ(stats.errors.size(), 2u);
  EXPECT_NE(stats.errors[1].find("line 3"), std::string::npos);
}

TEST(ParseBehaviorsTest, RejectsStructuralErrors) {
  EXPECT_FALSE(ParseText("1\tU1\tbad time\t\tN1-1\n").ok());
  EXPECT_FALSE(ParseText(absl::StrCat("1\tU1\t", kTime, "\t\t\n")).ok());
  EXPECT_FALSE(ParseText(absl::StrCat("1\t\t", kTime, "\t\tN1-1\n")).ok());
  EXPECT_FALSE(ParseText("1\tU1\n").ok());
}

TEST(ParseBehaviorsTest, WriteThenParseIsContentPreserving) {
  auto data = GenerateSynthetic(testing::TinySpec(4, 3));
  ASSERT_TRUE(data.ok());
  std::ostringstream out;
  WriteBehaviors(data->behaviors, out);
  auto back = ParseText(out.str());
  ASSERT_TRUE(back.ok()) << back.status();
  EXPECT_EQ(*back, data->behaviors);
}

TEST(ParseNewsTest, FieldsDuplicatesAndRoundTrip) {
  std::istringstream in(
      "N1\tsports\tsoccer\tGoal late\tabs\turl\t[]\t[]\n"
      "N2\tnews\tus\tShort row\n");
  auto news = ParseNews(in);
  ASSERT_TRUE(news.ok()) << news.status();
  ASSERT_EQ(news->size(), 2u);
  EXPECT_EQ((*news)[0].title, "Goal late");
  EXPECT_EQ((*news)[1].category, "news");
  EXPECT_TRUE((*news)[1].abstract.empty());

  std::ostringstream out;
  WriteNews(*news, out);
  std::istringstream again(out.str());
  EXPECT_EQ(*ParseNews(again), *news);

  std::istringstream dup("N1\ta\tb\tt\nN1\ta\tb\tu\n");
  auto bad = ParseNews(dup);
  ASSERT_FALSE(bad.ok());
  EXPECT_NE(bad.status().message().find("duplicate"), std::string::npos);
  std::istringstream short_row("N1\ta\tb\n");
  EXPECT_FALSE(ParseNews(short_row).ok());
}

TEST(TimestampTest, ParsesTwelveHourClock) {
  EXPECT_EQ(*ParseTimestamp("1/1/1970 12:00:00 AM"), 0);
  EXPECT_EQ(*ParseTimestamp("1/1/1970 12:00:01 PM"), 12 * 3600 + 1);
  EXPECT_EQ(*ParseTimestamp("1/2/1970 1:02:03 AM"), 86400 + 3723);
  EXPECT_FALSE(ParseTimestamp("2/30/2019 1:00:00 AM").ok());
  EXPECT_FALSE(ParseTimestamp("1/1/2019 13:00:00 PM").ok());
  EXPECT_FALSE(ParseTimestamp("1/1/2019 1:00:00").ok());
}

TEST(TimestampTest, FormatRoundTrips) {
  Rng rng(4);
  for (int i = 0; i < 1000; ++i) {
    const int64_t t = 1500000000 + rng.UniformInt(200000000);
    EXPECT_EQ(*ParseTimestamp(FormatTimestamp(t)), t);
  }
  EXPECT_EQ(FormatTimestamp(*ParseTimestamp(kTime)), kTime);
}

TEST(SplitTest, PureFunctionOfBoundaries) {
  const SplitBoundaries s{100, 200};
  EXPECT_EQ(s.Of(99), Split::kHistory);
  EXPECT_EQ(s.Of(100), Split::kTrain);
  EXPECT_EQ(s.Of(199), Split::kTrain);
  EXPECT_EQ(s.Of(200), Split::kEval);
}

Impression MakeImpression(int clicked, int unclicked) {
  Impression imp;
  imp.impression_id = "1";
  for (int i = 0; i < clicked; ++i) {
    imp.displayed.push_back({absl::StrCat("P", i), 1});
  }
  for (int i = 0; i < unclicked; ++i) {
    imp.displayed.push_back({absl::StrCat("X", i), 0});
  }
  return imp;
}

TEST(SampleNegativesTest, ExactZeroAndInsufficient) {
  Rng rng(5);
  const Impression imp = MakeImpression(2, 4);
  auto all = SampleNegatives(imp, 4, rng);
  ASSERT_TRUE(all.ok());
  EXPECT_EQ(std::set<std::string>(all->begin(), all->end()),
            (std::set<std::string>{"X0", "X1", "X2", "X3"}));
  EXPECT_TRUE(SampleNegatives(imp, 0, rng)->empty());
  EXPECT_EQ(SampleNegatives(imp, 5, rng).status().code(),
            absl::StatusCode::kFailedPrecondition);
  EXPECT_FALSE(SampleNegatives(imp, -1, rng).ok());
}

TEST(SampleNegativesTest, SeededAndUniform) {
  const Impression imp = MakeImpression(1, 6);
  Rng a(6), b(6);
  EXPECT_EQ(*SampleNegatives(imp, 3, a), *SampleNegatives(imp, 3, b));
  std::map<std::string, int> counts;
  Rng rng(7);
  const int trials = 30000;
  for (int t = 0; t < trials; ++t) {
    const auto sample = *SampleNegatives(imp, 2, rng);
    for (const auto& id : sample) ++counts[id];
  }
  ASSERT_EQ(counts.size(), 6u);
  for (const auto& [id, c] : counts) {
    EXPECT_NEAR(c / static_cast<double>(trials), 2.0 / 6, 0.015) << id;
  }
}

TEST(SyntheticTest, SameSeedSameData) {
  const SyntheticSpec spec = testing::TinySpec(6, 11);
  auto a = GenerateSynthetic(spec);
  auto b = GenerateSynthetic(spec);
  ASSERT_TRUE(a.ok() && b.ok());
  EXPECT_EQ(a->news, b->news);
  EXPECT_EQ(a->behaviors, b->behaviors);
  EXPECT_EQ(a->news_vectors, b->news_vectors);
  EXPECT_EQ(a->user_topics, b->user_topics);
  SyntheticSpec other = spec;
  other.seed = 12;
  EXPECT_NE(GenerateSynthetic(other)->behaviors, a->behaviors);
}

TEST(SyntheticTest, RejectsInfeasibleSpecs) {
  SyntheticSpec spec = testing::TinySpec(4, 1);
  spec.clicks_per_user = spec.news + 1;
  EXPECT_FALSE(GenerateSynthetic(spec).ok());
  spec = testing::TinySpec(4, 1);
  spec.topics_per_user = spec.topics + 1;
  EXPECT_FALSE(GenerateSynthetic(spec).ok());
  spec = testing::TinySpec(4, 1);
  spec.users = 0;
  EXPECT_FALSE(GenerateSynthetic(spec).ok());
  spec = testing::TinySpec(4, 1);
  spec.p_click = 1.5;
  EXPECT_FALSE(GenerateSynthetic(spec).ok());
}

std::map<std::string, int> NewsIndex(const SyntheticData& data) {
  std::map<std::string, int> index;
  for (size_t n = 0; n < data.news.size(); ++n) index[data.news[n].id] = n;
  return index;
}

TEST(SyntheticTest, SingleTopicUsersClickOneTopic) {
  SyntheticSpec spec;
  spec.topics_per_user = 1;
  auto data = GenerateSynthetic(spec);
  ASSERT_TRUE(data.ok());
  const auto index = NewsIndex(*data);
  for (const Impression& imp : data->behaviors) {
    std::set<int> topics;
    for (const auto& id : imp.history) topics.insert(data->news_topic[index.at(id)]);
    for (const auto& item : imp.displayed) {
      if (item.clicked) topics.insert(data->news_topic[index.at(item.news_id)]);
    }
    EXPECT_EQ(topics.size(), 1u) << imp.user_id;
  }
}

TEST(SyntheticTest, CertainClicksOnFollowedTopicsOnly) {
  SyntheticSpec spec = testing::TinySpec(4, 2);
  spec.p_click = 1.0;
  spec.in_topic_fraction = 1.0;
  auto data = GenerateSynthetic(spec);
  ASSERT_TRUE(data.ok());
  for (const Impression& imp : data->behaviors) {
    for (const auto& item : imp.displayed) EXPECT_EQ(item.clicked, 1);
  }
}

// Share of points whose cluster's majority topic is their own topic.
double Purity(const cluster::ClusterAssignment& a,
              const std::vector<int>& labels) {
  int agree = 0, total = 0;
  for (const auto& members : a.clusters) {
    std::map<int, int> votes;
    for (int m : members) ++votes[labels[m]];
    int best = 0;
    for (const auto& [label, c] : votes) best = std::max(best, c);
    agree += best;
    total += members.size();
  }
  return static_cast<double>(agree) / total;
}

TEST(SyntheticTest, ClusteringClickedNewsRecoversPlantedTopics) {
  SyntheticSpec spec;  // 200 users, 3 topics each
  auto data = GenerateSynthetic(spec);
  ASSERT_TRUE(data.ok());
  const auto index = NewsIndex(*data);
  std::set<std::string> seen;
  double purity_sum = 0;
  int users = 0, clusters = 0, points = 0;
  for (const Impression& imp : data->behaviors) {
    if (!seen.insert(imp.user_id).second) continue;
    nn::Matrix x(imp.history.size(), spec.dim);
    std::vector<int> labels;
    for (size_t i = 0; i < imp.history.size(); ++i) {
      const int n = index.at(imp.history[i]);
      x.row(i) = data->news_vectors.row(n);
      labels.push_back(data->news_topic[n]);
    }
    auto a = cluster::ClusterAverageLinkage(x, recall::RecallConfig{}.cluster_distance);
    ASSERT_TRUE(a.ok());
    purity_sum += Purity(*a, labels);
    clusters += a->size();
    points += x.rows();
    ++users;
  }
  ASSERT_EQ(users, spec.users);
  EXPECT_GE(purity_sum / users, 0.9);
  // Not the trivial all-singletons answer.
  EXPECT_LT(clusters, points / 2);
}

TEST(SyntheticTest, FilesRoundTrip) {
  testing::TempDir dir("data_test");
  auto data = GenerateSynthetic(testing::TinySpec(5, 8));
  ASSERT_TRUE(data.ok());
  ASSERT_TRUE(WriteSynthetic(*data, dir.path()).ok());
  auto truth = ReadSyntheticTruth(dir.path());
  ASSERT_TRUE(truth.ok()) << truth.status();
  EXPECT_EQ(truth->news_topic, data->news_topic);
  EXPECT_EQ(truth->news_subtopic, data->news_subtopic);
  EXPECT_EQ(truth->news_vectors, data->news_vectors);
  EXPECT_EQ(truth->user_ids, data->user_ids);
  EXPECT_EQ(truth->user_topics, data->user_topics);
  ASSERT_EQ(truth->news_ids.size(), data->news.size());
  EXPECT_EQ(truth->news_ids.front(), data->news.front().id);

  SplitBoundaries splits{*ParseTimestamp(kDefaultTrainStart),
                         *ParseTimestamp(kDefaultEvalStart)};
  auto loaded = LoadCorpus(dir.path(), splits);
  auto direct = BuildCorpus(data->news, data->behaviors, splits);
  ASSERT_TRUE(loaded.ok() && direct.ok());
  EXPECT_EQ(loaded->titles, direct->titles);
  EXPECT_EQ(loaded->users.size(), direct->users.size());
  EXPECT_FALSE(LoadCorpus(dir.path() / "missing", splits).ok());
}

std::vector<NewsArticle> SmallNews() {
  std::vector<NewsArticle> news;
  for (int i = 1; i <= 6; ++i) {
    NewsArticle a;
    a.id = absl::StrCat("N", i);
    a.title = absl::StrCat("word", i, " shared");
    news.push_back(a);
  }
  return news;
}

Impression At(const std::string& id, const std::string& time, Strings history,
              std::vector<DisplayedItem> displayed) {
  Impression imp;
  imp.impression_id = id;
  imp.user_id = "U1";
  imp.time = time;
  imp.timestamp = *ParseTimestamp(time);
  imp.history = std::move(history);
  imp.displayed = std::move(displayed);
  return imp;
}

TEST(BuildCorpusTest, SplitsHistoriesAndVocab) {
  const std::vector<Impression> behaviors = {
      At("3", "1/3/2020 1:00:00 AM", {"N1"}, {{"N5", 1}, {"N6", 0}}),
      At("1", "1/1/2020 1:00:00 AM", {"N1"}, {{"N2", 1}, {"N3", 0}}),
      At("2", "1/2/2020 1:00:00 AM", {"N1"},
         {{"N4", 1}, {"N3", 0}, {"N9", 0}}),
  };
  const SplitBoundaries splits{*ParseTimestamp("1/2/2020 12:00:00 AM"),
                               *ParseTimestamp("1/3/2020 12:00:00 AM")};
  auto corpus = BuildCorpus(SmallNews(), behaviors, splits);
  ASSERT_TRUE(corpus.ok()) << corpus.status();
  ASSERT_EQ(corpus->users.size(), 1u);
  const UserRecord& u = corpus->users[0];
  // History-split clicks extend the training history; unknown ids count.
  EXPECT_EQ(u.train_history, (std::vector<int>{0, 1}));
  ASSERT_EQ(u.train.size(), 1u);
  EXPECT_EQ(u.train[0].clicked, std::vector<int>{3});
  EXPECT_EQ(u.train[0].unclicked, std::vector<int>{2});
  EXPECT_EQ(u.eval_history, (std::vector<int>{0, 1, 3}));
  EXPECT_EQ(u.EvalClicks(), std::vector<int>{4});
  EXPECT_EQ(corpus->unknown_news, 1);

  // Only news seen before the eval split add words.
  EXPECT_NE(corpus->titles[0][0], ranking::Vocab::kUnk);
  EXPECT_EQ(corpus->titles[4][0], ranking::Vocab::kUnk);
  EXPECT_EQ(corpus->titles[4][1], corpus->titles[0][1]);

  const auto recall = MakeRecallExample(u);
  EXPECT_EQ(recall.history, u.train_history);
  EXPECT_EQ(recall.positives, std::vector<int>{3});
  EXPECT_EQ(recall.negative_pool, std::vector<int>{2});
  const auto ranking = MakeRankingExample(u);
  ASSERT_EQ(ranking.impressions.size(), 1u);
  EXPECT_EQ(ranking.impressions[0].clicked, std::vector<int>{3});

  EXPECT_FALSE(
      BuildCorpus(SmallNews(), behaviors, SplitBoundaries{10, 5}).ok());
}

TEST(MakeRecallExampleTest, PoolExcludesEveryClick) {
  UserRecord u;
  u.train_history = {9};
  u.train.push_back({0, {1, 2}, {3, 4, 2}});
  u.train.push_back({0, {5}, {4, 1, 6}});
  const auto e = MakeRecallExample(u);
  EXPECT_EQ(e.positives, (std::vector<int>{1, 2, 5}));
  EXPECT_EQ(e.negative_pool, (std::vector<int>{3, 4, 6}));
}

}  // namespace
}  // namespace fedrec::data
