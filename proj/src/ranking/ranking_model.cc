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

#include "fedrec/ranking/ranking_model.h"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>

#include "absl/strings/str_cat.h"
#include "fedrec/base/status_macros.h"
#include "fedrec/ranking/vocab.h"

namespace fedrec::ranking {
namespace {

std::vector<int> NonPadding(absl::Span<const int> tokens) {
  std::vector<int> out;
  out.reserve(tokens.size());
  for (int t : tokens) {
    if (t != Vocab::kPad) out.push_back(t);
  }
  return out;
}

absl::Status CheckTokens(absl::Span<const int> tokens, int vocab_size) {
  for (int t : tokens) {
    if (t < 0 || t >= vocab_size) {
      return absl::InvalidArgumentError(
          absl::StrCat("token id ", t, " outside vocabulary of ", vocab_size));
    }
  }
  return absl::OkStatus();
}

// Forward state of one news encoding, kept for the backward pass.
struct NewsTrace {
  std::vector<int> tokens;  // empty: the learned empty vector was used
  Matrix embedding_mask;
  nn::SelfAttentionCache attention;
  Matrix attention_mask;
  nn::AttentionPoolCache pool;
  Vector rep;
};

absl::Status EncodeNewsTraced(absl::Span<const int> title,
                              const RankingParams& params, double dropout,
                              Rng& rng, NewsTrace& trace) {
  trace.tokens = NonPadding(title);
  if (trace.tokens.empty()) {
    trace.rep = params.empty_news;
    return absl::OkStatus();
  }
  FEDREC_RETURN_IF_ERROR(
      CheckTokens(trace.tokens, static_cast<int>(params.word_embedding.rows())));
  const Matrix embedded = nn::GatherRows(params.word_embedding, trace.tokens);
  trace.embedding_mask =
      nn::DropoutMask(static_cast<int>(embedded.rows()),
                      static_cast<int>(embedded.cols()), dropout, rng);
  FEDREC_ASSIGN_OR_RETURN(
      const Matrix contextual,
      nn::SelfAttention(embedded.cwiseProduct(trace.embedding_mask),
                        params.news_attention, &trace.attention));
  trace.attention_mask =
      nn::DropoutMask(static_cast<int>(contextual.rows()),
                      static_cast<int>(contextual.cols()), dropout, rng);
  FEDREC_ASSIGN_OR_RETURN(
      const nn::AttentionPoolResult pooled,
      nn::AttentionPool(contextual.cwiseProduct(trace.attention_mask),
                        params.news_pool, &trace.pool));
  trace.rep = pooled.pooled;
  return absl::OkStatus();
}

void EncodeNewsBackward(const NewsTrace& trace, const RankingParams& params,
                        const Vector& d_rep, RankingParams& grads) {
  if (trace.tokens.empty()) {
    grads.empty_news += d_rep;
    return;
  }
  Matrix d_contextual;
  nn::AttentionPoolBackward(trace.pool, params.news_pool, d_rep, &d_contextual,
                            grads.news_pool);
  d_contextual = d_contextual.cwiseProduct(trace.attention_mask);
  Matrix d_embedded;
  nn::SelfAttentionBackward(trace.attention, params.news_attention,
                            d_contextual, &d_embedded, grads.news_attention);
  d_embedded = d_embedded.cwiseProduct(trace.embedding_mask);
  for (size_t i = 0; i < trace.tokens.size(); ++i) {
    grads.word_embedding.row(trace.tokens[i]) += d_embedded.row(i);
  }
}

}  // namespace

absl::Status RankingConfig::Validate() const {
  if (word_dim <= 0 || dim <= 0 || heads <= 0 || head_dim <= 0 ||
      attention_hidden <= 0) {
    return absl::InvalidArgumentError("ranking dimensions must be positive");
  }
  if (heads * head_dim != dim) {
    return absl::InvalidArgumentError(absl::StrCat(
        "heads * head_dim (", heads * head_dim, ") must equal dim (", dim,
        ")"));
  }
  if (negatives < 1) {
    return absl::InvalidArgumentError("ranking negatives must be >= 1");
  }
  if (!(dropout >= 0 && dropout < 1)) {
    return absl::InvalidArgumentError("dropout must be in [0, 1)");
  }
  if (!(init_limit > 0)) {
    return absl::InvalidArgumentError("init limit must be > 0");
  }
  return absl::OkStatus();
}

RankingParams RankingParams::Zeros(const RankingConfig& config,
                                   int vocab_size) {
  RankingParams p;
  p.word_embedding = Matrix::Zero(vocab_size, config.word_dim);
  p.news_attention = nn::SelfAttentionParams::Zeros(
      config.word_dim, config.heads, config.head_dim);
  p.news_pool = nn::AttentionPoolParams::Zeros(config.dim,
                                               config.attention_hidden);
  p.user_attention =
      nn::SelfAttentionParams::Zeros(config.dim, config.heads, config.head_dim);
  p.user_pool = nn::AttentionPoolParams::Zeros(config.dim,
                                               config.attention_hidden);
  p.empty_news = Vector::Zero(config.dim);
  return p;
}

RankingParams RankingParams::Initialize(const RankingConfig& config,
                                        int vocab_size, Rng& rng) {
  RankingParams p = Zeros(config, vocab_size);
  nn::FillUniform(p.Params(), config.init_limit, rng);
  if (vocab_size > 0) p.word_embedding.row(Vocab::kPad).setZero();
  p.news_attention.AddIdentity(config.identity_init);
  p.user_attention.AddIdentity(config.identity_init);
  return p;
}

nn::ParamList RankingParams::Params() {
  nn::ParamList out;
  nn::AppendMatrix("ranking/word_embedding", word_embedding, out);
  news_attention.AppendTo("ranking/news_attention", out);
  news_pool.AppendTo("ranking/news_pool", out);
  user_attention.AppendTo("ranking/user_attention", out);
  user_pool.AppendTo("ranking/user_pool", out);
  nn::AppendVector("ranking/empty_news", empty_news, out);
  return out;
}

absl::StatusOr<Vector> EncodeNews(absl::Span<const int> title_tokens,
                                  const RankingParams& params) {
  const std::vector<int> tokens = NonPadding(title_tokens);
  if (tokens.empty()) return absl::InvalidArgumentError("zero-token title");
  FEDREC_RETURN_IF_ERROR(
      CheckTokens(tokens, static_cast<int>(params.word_embedding.rows())));
  FEDREC_ASSIGN_OR_RETURN(
      const Matrix contextual,
      nn::SelfAttention(nn::GatherRows(params.word_embedding, tokens),
                        params.news_attention));
  FEDREC_ASSIGN_OR_RETURN(const nn::AttentionPoolResult pooled,
                          nn::AttentionPool(contextual, params.news_pool));
  return pooled.pooled;
}

absl::StatusOr<Vector> EncodeNewsOrEmpty(absl::Span<const int> title_tokens,
                                         const RankingParams& params) {
  if (NonPadding(title_tokens).empty()) return params.empty_news;
  return EncodeNews(title_tokens, params);
}

absl::StatusOr<Matrix> EncodeNewsBatch(
    const std::vector<std::vector<int>>& titles, const RankingParams& params) {
  Matrix reps(titles.size(), params.dim());
  for (size_t i = 0; i < titles.size(); ++i) {
    FEDREC_ASSIGN_OR_RETURN(const Vector rep,
                            EncodeNewsOrEmpty(titles[i], params));
    reps.row(i) = rep.transpose();
  }
  return reps;
}

absl::StatusOr<Vector> EncodeUser(const Matrix& clicked_news_reps,
                                  const RankingParams& params) {
  if (clicked_news_reps.rows() == 0) {
    return absl::InvalidArgumentError("cold user");
  }
  FEDREC_ASSIGN_OR_RETURN(
      const Matrix contextual,
      nn::SelfAttention(clicked_news_reps, params.user_attention));
  FEDREC_ASSIGN_OR_RETURN(const nn::AttentionPoolResult pooled,
                          nn::AttentionPool(contextual, params.user_pool));
  return pooled.pooled;
}

absl::StatusOr<std::vector<RankedItem>> RankCandidates(
    const Vector& user, const Matrix& candidate_reps,
    absl::Span<const int> candidate_news, int display) {
  if (candidate_reps.rows() != static_cast<Eigen::Index>(candidate_news.size())) {
    return absl::InvalidArgumentError("candidate labels and rows differ");
  }
  if (candidate_reps.rows() > 0 && candidate_reps.cols() != user.size()) {
    return absl::InvalidArgumentError("candidate dimension mismatch");
  }
  if (display < 0) return absl::InvalidArgumentError("display size < 0");
  if (display > static_cast<int>(candidate_news.size())) {
    return absl::InvalidArgumentError(
        absl::StrCat("display size ", display, " exceeds the ",
                     candidate_news.size(), " candidates"));
  }
  std::vector<RankedItem> items(candidate_news.size());
  for (size_t i = 0; i < items.size(); ++i) {
    items[i] = {candidate_news[i], candidate_reps.row(i).dot(user)};
  }
  const size_t keep = static_cast<size_t>(display);
  std::partial_sort(items.begin(), items.begin() + keep, items.end(),
                    [](const RankedItem& a, const RankedItem& b) {
                      if (a.score != b.score) return a.score > b.score;
                      return a.news < b.news;
                    });
  items.resize(keep);
  return items;
}

absl::StatusOr<RankingLossResult> RankingLoss(
    const RankingExample& example, const std::vector<std::vector<int>>& titles,
    const RankingParams& params, const RankingLossOptions& options, Rng& rng,
    RankingParams* grads, double grad_scale) {
  if (example.history.empty()) return absl::InvalidArgumentError("cold user");
  const int k = options.negatives;
  auto check_news = [&](int news) -> absl::Status {
    if (news < 0 || news >= static_cast<int>(titles.size())) {
      return absl::InvalidArgumentError(
          absl::StrCat("news index ", news, " out of range"));
    }
    return absl::OkStatus();
  };

  // Randomness order: negatives, then dropout masks in news-index order, then
  // the user encoder's masks.
  RankingLossResult result;
  struct Behavior {
    int positive;
    std::vector<int> negatives;
  };
  std::vector<Behavior> behaviors;
  for (const RankingImpression& impression : example.impressions) {
    if (impression.clicked.empty()) continue;
    if (static_cast<int>(impression.unclicked.size()) < k) {
      ++result.skipped_impressions;
      continue;
    }
    for (int positive : impression.clicked) {
      FEDREC_RETURN_IF_ERROR(check_news(positive));
      std::vector<int> picks = rng.SampleWithoutReplacement(
          static_cast<int>(impression.unclicked.size()), k);
      for (int& i : picks) {
        i = impression.unclicked[i];
        FEDREC_RETURN_IF_ERROR(check_news(i));
      }
      behaviors.push_back({positive, std::move(picks)});
    }
  }
  result.positives = static_cast<int>(behaviors.size());
  if (behaviors.empty()) return result;

  const size_t history_begin =
      example.history.size() > kMaxUserHistory
          ? example.history.size() - kMaxUserHistory
          : 0;
  const std::vector<int> history(example.history.begin() + history_begin,
                                 example.history.end());

  std::map<int, NewsTrace> traces;
  for (int news : history) {
    FEDREC_RETURN_IF_ERROR(check_news(news));
    traces[news];
  }
  for (const Behavior& b : behaviors) {
    traces[b.positive];
    for (int n : b.negatives) traces[n];
  }
  for (auto& [news, trace] : traces) {
    FEDREC_RETURN_IF_ERROR(
        EncodeNewsTraced(titles[news], params, options.dropout, rng, trace));
  }

  Matrix clicked(history.size(), params.dim());
  for (size_t i = 0; i < history.size(); ++i) {
    clicked.row(i) = traces[history[i]].rep.transpose();
  }
  nn::SelfAttentionCache user_attention;
  FEDREC_ASSIGN_OR_RETURN(
      const Matrix contextual,
      nn::SelfAttention(clicked, params.user_attention, &user_attention));
  const Matrix user_mask =
      nn::DropoutMask(static_cast<int>(contextual.rows()),
                      static_cast<int>(contextual.cols()), options.dropout, rng);
  nn::AttentionPoolCache user_pool;
  FEDREC_ASSIGN_OR_RETURN(
      const nn::AttentionPoolResult pooled,
      nn::AttentionPool(contextual.cwiseProduct(user_mask), params.user_pool,
                        &user_pool));
  const Vector& user = pooled.pooled;

  const double inv = 1.0 / behaviors.size();
  std::map<int, Vector> d_news;
  Vector d_user = Vector::Zero(user.size());
  double loss = 0;
  for (const Behavior& b : behaviors) {
    std::vector<int> items;
    items.reserve(k + 1);
    items.push_back(b.positive);
    items.insert(items.end(), b.negatives.begin(), b.negatives.end());
    Vector logits(items.size());
    for (size_t i = 0; i < items.size(); ++i) {
      logits(i) = traces[items[i]].rep.dot(user);
    }
    const double max = logits.maxCoeff();
    const double log_norm = max + std::log((logits.array() - max).exp().sum());
    loss += (log_norm - logits(0)) * inv;
    if (grads == nullptr) continue;
    const Vector probs = (logits.array() - log_norm).exp();
    for (size_t i = 0; i < items.size(); ++i) {
      const double coeff =
          (probs(i) - (i == 0 ? 1.0 : 0.0)) * inv * grad_scale;
      d_user += coeff * traces[items[i]].rep;
      auto [it, inserted] =
          d_news.try_emplace(items[i], Vector::Zero(user.size()));
      it->second += coeff * user;
    }
  }
  if (!std::isfinite(loss)) {
    return absl::AbortedError("non-finite ranking loss");
  }
  result.loss = loss;
  if (grads == nullptr) return result;

  Matrix d_contextual;
  nn::AttentionPoolBackward(user_pool, params.user_pool, d_user, &d_contextual,
                            grads->user_pool);
  d_contextual = d_contextual.cwiseProduct(user_mask);
  Matrix d_clicked;
  nn::SelfAttentionBackward(user_attention, params.user_attention,
                            d_contextual, &d_clicked, grads->user_attention);
  for (size_t i = 0; i < history.size(); ++i) {
    auto [it, inserted] =
        d_news.try_emplace(history[i], Vector::Zero(user.size()));
    it->second += d_clicked.row(i).transpose();
  }
  for (const auto& [news, d_rep] : d_news) {
    EncodeNewsBackward(traces[news], params, d_rep, *grads);
  }
  return result;
}

}  // namespace fedrec::ranking
