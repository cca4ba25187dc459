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

#include "fedrec/data/dataset.h"

#include <chrono>
#include <unordered_set>

#include "absl/strings/numbers.h"
#include "absl/strings/str_cat.h"
#include "absl/strings/str_format.h"
#include "absl/strings/str_join.h"
#include "absl/strings/str_split.h"
#include "fedrec/base/status_macros.h"

namespace fedrec::data {
namespace {

constexpr int kMaxRecordedErrors = 10;

absl::string_view StripCr(absl::string_view line) {
  if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
  return line;
}

std::vector<std::string> SplitIds(absl::string_view field) {
  return absl::StrSplit(field, ' ', absl::SkipEmpty());
}

absl::StatusOr<Impression> ParseBehaviorLine(absl::string_view line) {
  std::vector<absl::string_view> fields = absl::StrSplit(line, '\t');
  if (fields.size() != 5) {
    return absl::InvalidArgumentError(
        absl::StrCat("expected 5 tab-separated fields, found ", fields.size()));
  }
  Impression imp;
  imp.impression_id = std::string(fields[0]);
  imp.user_id = std::string(fields[1]);
  if (imp.user_id.empty()) return absl::InvalidArgumentError("empty user id");
  imp.time = std::string(fields[2]);
  FEDREC_ASSIGN_OR_RETURN(imp.timestamp, ParseTimestamp(imp.time));
  imp.history = SplitIds(fields[3]);
  if (imp.history.size() > kMaxHistory) {
    imp.history.erase(imp.history.begin(),
                      imp.history.end() - kMaxHistory);
  }
  for (absl::string_view token :
       absl::StrSplit(fields[4], ' ', absl::SkipEmpty())) {
    const size_t dash = token.rfind('-');
    if (dash == absl::string_view::npos || dash == 0) {
      return absl::InvalidArgumentError(
          absl::StrCat("impression token '", token, "' lacks a -label suffix"));
    }
    const absl::string_view label = token.substr(dash + 1);
    if (label != "0" && label != "1") {
      return absl::InvalidArgumentError(absl::StrCat(
          "impression token '", token, "' has label '", label,
          "', expected 0 or 1"));
    }
    imp.displayed.push_back(
        {std::string(token.substr(0, dash)), label == "1" ? 1 : 0});
  }
  if (imp.displayed.empty()) {
    return absl::InvalidArgumentError("impression displays no news");
  }
  return imp;
}

}  // namespace

absl::StatusOr<std::vector<NewsArticle>> ParseNews(std::istream& in) {
  std::vector<NewsArticle> news;
  std::unordered_set<std::string> seen;
  std::string raw;
  int line_number = 0;
  while (std::getline(in, raw)) {
    ++line_number;
    const absl::string_view line = StripCr(raw);
    if (line.empty()) continue;
    std::vector<absl::string_view> fields = absl::StrSplit(line, '\t');
    if (fields.size() < 4) {
      return absl::InvalidArgumentError(
          absl::StrCat("news line ", line_number, ": expected at least 4 ",
                       "tab-separated fields, found ", fields.size()));
    }
    fields.resize(8);
    NewsArticle article{std::string(fields[0]), std::string(fields[1]),
                        std::string(fields[2]), std::string(fields[3]),
                        std::string(fields[4]), std::string(fields[5]),
                        std::string(fields[6]), std::string(fields[7])};
    if (!seen.insert(article.id).second) {
      return absl::InvalidArgumentError(absl::StrCat(
          "news line ", line_number, ": duplicate news id ", article.id));
    }
    news.push_back(std::move(article));
  }
  return news;
}

void WriteNews(const std::vector<NewsArticle>& news, std::ostream& out) {
  for (const NewsArticle& a : news) {
    out << a.id << '\t' << a.category << '\t' << a.subcategory << '\t'
        << a.title << '\t' << a.abstract << '\t' << a.url << '\t'
        << a.title_entities << '\t' << a.abstract_entities << '\n';
  }
}

absl::StatusOr<std::vector<Impression>> ParseBehaviors(
    std::istream& in, const ParseOptions& options, ParseStats* stats) {
  ParseStats local;
  ParseStats& s = stats != nullptr ? *stats : local;
  std::vector<Impression> out;
  std::string raw;
  int line_number = 0;
  while (std::getline(in, raw)) {
    ++line_number;
    const absl::string_view line = StripCr(raw);
    if (line.empty()) continue;
    ++s.lines;
    absl::StatusOr<Impression> imp = ParseBehaviorLine(line);
    if (!imp.ok()) {
      const std::string message = absl::StrCat(
          "behaviors line ", line_number, ": ", imp.status().message());
      if (!options.continue_on_error) {
        return absl::InvalidArgumentError(message);
      }
      ++s.skipped;
      if (s.errors.size() < kMaxRecordedErrors) s.errors.push_back(message);
      continue;
    }
    out.push_back(*std::move(imp));
  }
  return out;
}

void WriteBehaviors(const std::vector<Impression>& impressions,
                    std::ostream& out) {
  for (const Impression& imp : impressions) {
    out << imp.impression_id << '\t' << imp.user_id << '\t' << imp.time << '\t'
        << absl::StrJoin(imp.history, " ") << '\t'
        << absl::StrJoin(imp.displayed, " ",
                         [](std::string* s, const DisplayedItem& item) {
                           absl::StrAppend(s, item.news_id, "-", item.clicked);
                         })
        << '\n';
  }
}

absl::StatusOr<int64_t> ParseTimestamp(absl::string_view text) {
  auto bad = [&] {
    return absl::InvalidArgumentError(absl::StrCat(
        "bad timestamp '", text, "', expected M/D/YYYY h:mm:ss AM|PM"));
  };
  std::vector<absl::string_view> parts =
      absl::StrSplit(text, ' ', absl::SkipEmpty());
  if (parts.size() != 3) return bad();
  std::vector<absl::string_view> date = absl::StrSplit(parts[0], '/');
  std::vector<absl::string_view> clock = absl::StrSplit(parts[1], ':');
  if (date.size() != 3 || clock.size() != 3) return bad();
  int month, day, year, hour, minute, second;
  if (!absl::SimpleAtoi(date[0], &month) || !absl::SimpleAtoi(date[1], &day) ||
      !absl::SimpleAtoi(date[2], &year) || !absl::SimpleAtoi(clock[0], &hour) ||
      !absl::SimpleAtoi(clock[1], &minute) ||
      !absl::SimpleAtoi(clock[2], &second)) {
    return bad();
  }
  if (hour < 1 || hour > 12 || minute < 0 || minute > 59 || second < 0 ||
      second > 60) {
    return bad();
  }
  if (parts[2] == "AM") {
    if (hour == 12) hour = 0;
  } else if (parts[2] == "PM") {
    if (hour != 12) hour += 12;
  } else {
    return bad();
  }
  const std::chrono::year_month_day ymd{
      std::chrono::year(year), std::chrono::month(month),
      std::chrono::day(day)};
  if (!ymd.ok()) return bad();
  const auto days = std::chrono::sys_days(ymd).time_since_epoch().count();
  return int64_t{days} * 86400 + hour * 3600 + minute * 60 + second;
}

std::string FormatTimestamp(int64_t seconds) {
  int64_t days = seconds / 86400;
  int64_t rest = seconds % 86400;
  if (rest < 0) {
    rest += 86400;
    --days;
  }
  const std::chrono::year_month_day ymd{
      std::chrono::sys_days(std::chrono::days(days))};
  const int hour24 = static_cast<int>(rest / 3600);
  const int hour12 = hour24 % 12 == 0 ? 12 : hour24 % 12;
  return absl::StrFormat("%u/%u/%d %d:%02d:%02d %s",
                         static_cast<unsigned>(ymd.month()),
                         static_cast<unsigned>(ymd.day()),
                         static_cast<int>(ymd.year()), hour12,
                         static_cast<int>(rest / 60 % 60),
                         static_cast<int>(rest % 60),
                         hour24 < 12 ? "AM" : "PM");
}

absl::StatusOr<std::vector<std::string>> SampleNegatives(
    const Impression& impression, int k, Rng& rng) {
  if (k < 0) return absl::InvalidArgumentError("negative sample count < 0");
  std::vector<const std::string*> pool;
  for (const DisplayedItem& item : impression.displayed) {
    if (item.clicked == 0) pool.push_back(&item.news_id);
  }
  if (static_cast<int>(pool.size()) < k) {
    return absl::FailedPreconditionError(
        absl::StrCat("impression ", impression.impression_id, " has ",
                     pool.size(), " non-clicked items, need ", k));
  }
  std::vector<std::string> out;
  for (int i : rng.SampleWithoutReplacement(static_cast<int>(pool.size()), k)) {
    out.push_back(*pool[i]);
  }
  return out;
}

}  // namespace fedrec::data
