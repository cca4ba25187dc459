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

#ifndef FEDREC_RANKING_VOCAB_H_
#define FEDREC_RANKING_VOCAB_H_

#include <string>
#include <unordered_map>
#include <vector>

#include "absl/strings/string_view.h"

namespace fedrec::ranking {

inline constexpr int kMaxTitleTokens = 30;

// Lowercases ASCII letters and splits on whitespace and ASCII punctuation,
// which are dropped. Bytes >= 0x80 are kept as token characters.
std::vector<std::string> Tokenize(absl::string_view text);

// Token -> id map. Id 0 is padding, id 1 is the shared out-of-vocabulary id;
// other ids follow first-seen order.
class Vocab {
 public:
  static constexpr int kPad = 0;
  static constexpr int kUnk = 1;

  Vocab();
  explicit Vocab(std::vector<std::string> tokens);

  int Lookup(absl::string_view token) const;
  int AddOrLookup(absl::string_view token);
  int size() const { return static_cast<int>(tokens_.size()); }
  const std::vector<std::string>& tokens() const { return tokens_; }

  // Tokenizes and maps `text`, truncating to kMaxTitleTokens. When `grow` is
  // set unseen tokens are added, otherwise they map to kUnk.
  std::vector<int> Encode(absl::string_view text, bool grow);

 private:
  std::vector<std::string> tokens_;
  std::unordered_map<std::string, int> ids_;
};

}  // namespace fedrec::ranking

#endif  // FEDREC_RANKING_VOCAB_H_
