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

#include "fedrec/data/synthetic.h"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <set>
#include <sstream>

#include "absl/strings/numbers.h"
#include "absl/strings/str_cat.h"
#include "absl/strings/str_format.h"
#include "absl/strings/str_join.h"
#include "absl/strings/str_split.h"
#include "fedrec/base/random.h"
#include "fedrec/base/status_macros.h"

namespace fedrec::data {
namespace {

constexpr int64_t kTrainSpanSeconds = 5 * 86400;
constexpr int64_t kEvalSpanSeconds = 2 * 86400;

struct UserProfile {
  std::vector<int> topics;
  std::vector<int> preferred;  // subtopic per followed topic
};

class Generator {
 public:
  Generator(const SyntheticSpec& spec, Rng& rng) : spec_(spec), rng_(rng) {}

  void PlantNews(SyntheticData& out) {
    const int d = spec_.dim;
    nn::Matrix centroids(spec_.topics, d);
    for (Eigen::Index i = 0; i < centroids.size(); ++i) {
      centroids.data()[i] = rng_.Normal() * spec_.topic_scale;
    }
    nn::Matrix offsets(spec_.topics * spec_.subtopics, d);
    for (Eigen::Index i = 0; i < offsets.size(); ++i) {
      offsets.data()[i] = rng_.Normal() * spec_.subtopic_scale;
    }
    out.news_topic.resize(spec_.news);
    out.news_subtopic.resize(spec_.news);
    out.news_vectors.resize(spec_.news, d);
    members_.assign(spec_.topics,
                    std::vector<std::vector<int>>(spec_.subtopics));
    topic_members_.assign(spec_.topics, {});
    for (int n = 0; n < spec_.news; ++n) {
      const int t = n < spec_.topics ? n : static_cast<int>(
                                               rng_.UniformInt(spec_.topics));
      const int s = static_cast<int>(rng_.UniformInt(spec_.subtopics));
      out.news_topic[n] = t;
      out.news_subtopic[n] = s;
      members_[t][s].push_back(n);
      topic_members_[t].push_back(n);
      for (int j = 0; j < d; ++j) {
        out.news_vectors(n, j) = centroids(t, j) +
                                 offsets(t * spec_.subtopics + s, j) +
                                 rng_.Normal() * spec_.item_scale;
      }
      out.news.push_back(MakeArticle(n, t, s));
    }
  }

  UserProfile DrawUser() {
    UserProfile user;
    user.topics = rng_.SampleWithoutReplacement(spec_.topics,
                                                spec_.topics_per_user);
    for (int t : user.topics) {
      std::vector<int> nonempty;
      for (int s = 0; s < spec_.subtopics; ++s) {
        if (!members_[t][s].empty()) nonempty.push_back(s);
      }
      user.preferred.push_back(
          nonempty[rng_.UniformInt(nonempty.size())]);
    }
    return user;
  }

  // A followed-topic item not in `taken`, favoring the preferred subtopic.
  // Returns -1 when every item of the followed topics is taken.
  int DrawInterest(const UserProfile& user, const std::set<int>& taken) {
    const size_t i = rng_.UniformInt(user.topics.size());
    const int t = user.topics[i];
    const bool focused = rng_.Bernoulli(spec_.subtopic_focus);
    const std::vector<int>& pool =
        focused ? members_[t][user.preferred[i]] : topic_members_[t];
    int pick = DrawFree(pool, taken);
    if (pick >= 0) return pick;
    for (int other : user.topics) {
      pick = DrawFree(topic_members_[other], taken);
      if (pick >= 0) return pick;
    }
    return -1;
  }

  // Any item not in `taken`, or -1.
  int DrawAny(const std::set<int>& taken) {
    if (static_cast<int>(taken.size()) >= spec_.news) return -1;
    while (true) {
      const int n = static_cast<int>(rng_.UniformInt(spec_.news));
      if (!taken.contains(n)) return n;
    }
  }

 private:
  int DrawFree(const std::vector<int>& pool, const std::set<int>& taken) {
    std::vector<int> free;
    for (int n : pool) {
      if (!taken.contains(n)) free.push_back(n);
    }
    if (free.empty()) return -1;
    return free[rng_.UniformInt(free.size())];
  }

  NewsArticle MakeArticle(int n, int topic, int subtopic) {
    std::vector<std::string> words;
    for (int w = 0; w < spec_.title_length; ++w) {
      if (rng_.Bernoulli(spec_.topic_word_rate)) {
        words.push_back(absl::StrCat(
            "t", topic, "w", rng_.UniformInt(spec_.words_per_topic)));
      } else {
        words.push_back(absl::StrCat("c", rng_.UniformInt(spec_.common_words)));
      }
    }
    std::string title = absl::StrJoin(words, " ");
    if (!title.empty()) title[0] = static_cast<char>(std::toupper(title[0]));
    NewsArticle article;
    article.id = absl::StrCat("N", n + 1);
    article.category = absl::StrCat("topic", topic);
    article.subcategory = absl::StrCat("topic", topic, "_", subtopic);
    article.title = std::move(title);
    article.title_entities = "[]";
    article.abstract_entities = "[]";
    return article;
  }

  const SyntheticSpec& spec_;
  Rng& rng_;
  std::vector<std::vector<std::vector<int>>> members_;  // [topic][subtopic]
  std::vector<std::vector<int>> topic_members_;
};

std::string NewsId(int n) { return absl::StrCat("N", n + 1); }

}  // namespace

absl::Status SyntheticSpec::Validate() const {
  if (users < 1 || news < 1 || topics < 1 || subtopics < 1 ||
      topics_per_user < 1 || clicks_per_user < 1 || impression_size < 1 ||
      dim < 1 || words_per_topic < 1 || common_words < 1 ||
      title_length < 1) {
    return absl::InvalidArgumentError("synthetic counts must be >= 1");
  }
  if (train_impressions < 0 || eval_impressions < 0) {
    return absl::InvalidArgumentError("impression counts must be >= 0");
  }
  if (topics_per_user > topics) {
    return absl::InvalidArgumentError(absl::StrCat(
        "topics per user (", topics_per_user, ") exceeds topics (", topics,
        ")"));
  }
  if (topics > news) {
    return absl::InvalidArgumentError("more topics than news");
  }
  if (clicks_per_user > news) {
    return absl::InvalidArgumentError(absl::StrCat(
        "clicks per user (", clicks_per_user, ") exceeds news (", news, ")"));
  }
  if (clicks_per_user + impression_size > news) {
    return absl::InvalidArgumentError(
        "history plus one impression does not fit in the news pool");
  }
  for (double p : {in_topic_fraction, p_click, subtopic_focus,
                   topic_word_rate}) {
    if (!(p >= 0 && p <= 1)) {
      return absl::InvalidArgumentError("probabilities must be in [0, 1]");
    }
  }
  if (!(topic_scale >= 0 && subtopic_scale >= 0 && item_scale >= 0)) {
    return absl::InvalidArgumentError("scales must be >= 0");
  }
  return absl::OkStatus();
}

absl::StatusOr<SyntheticData> GenerateSynthetic(const SyntheticSpec& spec) {
  FEDREC_RETURN_IF_ERROR(spec.Validate());
  FEDREC_ASSIGN_OR_RETURN(const int64_t train_start,
                          ParseTimestamp(kDefaultTrainStart));
  FEDREC_ASSIGN_OR_RETURN(const int64_t eval_start,
                          ParseTimestamp(kDefaultEvalStart));
  Rng rng(DeriveSeed(spec.seed, {Tag(StreamTag::kSynthetic)}));
  SyntheticData out;
  Generator gen(spec, rng);
  gen.PlantNews(out);

  int impression_id = 0;
  for (int u = 0; u < spec.users; ++u) {
    const UserProfile user = gen.DrawUser();
    const std::string user_id = absl::StrCat("U", u + 1);
    out.user_ids.push_back(user_id);
    out.user_topics.push_back(user.topics);

    std::set<int> history_set;
    std::vector<std::string> history;
    for (int c = 0; c < spec.clicks_per_user; ++c) {
      int n = gen.DrawInterest(user, history_set);
      if (n < 0) n = gen.DrawAny(history_set);
      history_set.insert(n);
      history.push_back(NewsId(n));
    }
    if (history.size() > kMaxHistory) {
      history.erase(history.begin(), history.end() - kMaxHistory);
    }

    std::vector<int64_t> times;
    for (int i = 0; i < spec.train_impressions; ++i) {
      times.push_back(train_start +
                      static_cast<int64_t>(rng.UniformInt(kTrainSpanSeconds)));
    }
    std::sort(times.begin(), times.end());
    std::vector<int64_t> eval_times;
    for (int i = 0; i < spec.eval_impressions; ++i) {
      eval_times.push_back(
          eval_start + static_cast<int64_t>(rng.UniformInt(kEvalSpanSeconds)));
    }
    std::sort(eval_times.begin(), eval_times.end());
    times.insert(times.end(), eval_times.begin(), eval_times.end());

    for (int64_t t : times) {
      Impression imp;
      imp.impression_id = absl::StrCat(++impression_id);
      imp.user_id = user_id;
      imp.timestamp = t;
      imp.time = FormatTimestamp(t);
      imp.history = history;
      std::set<int> taken = history_set;
      for (int slot = 0; slot < spec.impression_size; ++slot) {
        int n = rng.Bernoulli(spec.in_topic_fraction)
                    ? gen.DrawInterest(user, taken)
                    : gen.DrawAny(taken);
        if (n < 0) n = gen.DrawAny(taken);
        if (n < 0) break;
        taken.insert(n);
        const bool followed =
            std::find(user.topics.begin(), user.topics.end(),
                      out.news_topic[n]) != user.topics.end();
        const bool clicked = followed && rng.Bernoulli(spec.p_click);
        imp.displayed.push_back({NewsId(n), clicked ? 1 : 0});
      }
      out.behaviors.push_back(std::move(imp));
    }
  }
  return out;
}

absl::Status WriteSynthetic(const SyntheticData& data,
                            const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) {
    return absl::InternalError(
        absl::StrCat("cannot create ", dir.string(), ": ", ec.message()));
  }
  auto open = [&](const char* name, std::ofstream& f) -> absl::Status {
    f.open(dir / name, std::ios::binary | std::ios::trunc);
    if (!f) {
      return absl::InternalError(
          absl::StrCat("cannot write ", (dir / name).string()));
    }
    return absl::OkStatus();
  };
  std::ofstream news, behaviors, news_truth, user_truth;
  FEDREC_RETURN_IF_ERROR(open(kNewsFile, news));
  FEDREC_RETURN_IF_ERROR(open(kBehaviorsFile, behaviors));
  FEDREC_RETURN_IF_ERROR(open(kNewsTruthFile, news_truth));
  FEDREC_RETURN_IF_ERROR(open(kUserTruthFile, user_truth));
  WriteNews(data.news, news);
  WriteBehaviors(data.behaviors, behaviors);
  for (size_t n = 0; n < data.news.size(); ++n) {
    news_truth << data.news[n].id << '\t' << data.news_topic[n] << '\t'
               << data.news_subtopic[n];
    for (Eigen::Index j = 0; j < data.news_vectors.cols(); ++j) {
      news_truth << '\t' << absl::StrFormat("%.17g", data.news_vectors(n, j));
    }
    news_truth << '\n';
  }
  for (size_t u = 0; u < data.user_ids.size(); ++u) {
    user_truth << data.user_ids[u] << '\t'
               << absl::StrJoin(data.user_topics[u], " ") << '\n';
  }
  for (std::ofstream* f : {&news, &behaviors, &news_truth, &user_truth}) {
    f->close();
    if (!*f) return absl::InternalError("write failed");
  }
  return absl::OkStatus();
}

absl::StatusOr<SyntheticTruth> ReadSyntheticTruth(
    const std::filesystem::path& dir) {
  SyntheticTruth truth;
  std::ifstream news(dir / kNewsTruthFile);
  if (!news) {
    return absl::NotFoundError(
        absl::StrCat("missing ", (dir / kNewsTruthFile).string()));
  }
  std::vector<std::vector<double>> rows;
  std::string line;
  int line_number = 0;
  while (std::getline(news, line)) {
    ++line_number;
    if (line.empty()) continue;
    std::vector<absl::string_view> fields = absl::StrSplit(line, '\t');
    int topic = 0;
    int subtopic = 0;
    if (fields.size() < 3 || !absl::SimpleAtoi(fields[1], &topic) ||
        !absl::SimpleAtoi(fields[2], &subtopic)) {
      return absl::InvalidArgumentError(
          absl::StrCat(kNewsTruthFile, " line ", line_number, ": malformed"));
    }
    std::vector<double> v;
    for (size_t j = 3; j < fields.size(); ++j) {
      double x = 0;
      if (!absl::SimpleAtod(fields[j], &x)) {
        return absl::InvalidArgumentError(absl::StrCat(
            kNewsTruthFile, " line ", line_number, ": bad number"));
      }
      v.push_back(x);
    }
    if (!rows.empty() && v.size() != rows.front().size()) {
      return absl::InvalidArgumentError(absl::StrCat(
          kNewsTruthFile, " line ", line_number, ": ragged vector"));
    }
    truth.news_ids.emplace_back(fields[0]);
    truth.news_topic.push_back(topic);
    truth.news_subtopic.push_back(subtopic);
    rows.push_back(std::move(v));
  }
  const int dim = rows.empty() ? 0 : static_cast<int>(rows.front().size());
  truth.news_vectors.resize(rows.size(), dim);
  for (size_t i = 0; i < rows.size(); ++i) {
    for (int j = 0; j < dim; ++j) truth.news_vectors(i, j) = rows[i][j];
  }

  std::ifstream users(dir / kUserTruthFile);
  if (!users) {
    return absl::NotFoundError(
        absl::StrCat("missing ", (dir / kUserTruthFile).string()));
  }
  while (std::getline(users, line)) {
    if (line.empty()) continue;
    std::vector<absl::string_view> fields = absl::StrSplit(line, '\t');
    if (fields.size() != 2) {
      return absl::InvalidArgumentError(
          absl::StrCat(kUserTruthFile, ": malformed line"));
    }
    std::vector<int> topics;
    for (absl::string_view t : absl::StrSplit(fields[1], ' ', absl::SkipEmpty())) {
      int topic = 0;
      if (!absl::SimpleAtoi(t, &topic)) {
        return absl::InvalidArgumentError(
            absl::StrCat(kUserTruthFile, ": bad topic"));
      }
      topics.push_back(topic);
    }
    truth.user_ids.emplace_back(fields[0]);
    truth.user_topics.push_back(std::move(topics));
  }
  return truth;
}

}  // namespace fedrec::data
