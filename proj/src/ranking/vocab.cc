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

#include "fedrec/ranking/vocab.h"

#include <cctype>

namespace fedrec::ranking {

std::vector<std::string> Tokenize(absl::string_view text) {
  std::vector<std::string> tokens;
  std::string current;
  for (char raw : text) {
    const auto c = static_cast<unsigned char>(raw);
    if (c < 0x80 && (std::isspace(c) || std::ispunct(c) || std::iscntrl(c))) {
      if (!current.empty()) tokens.push_back(std::move(current));
      current.clear();
      continue;
    }
    current.push_back(c < 0x80 ? static_cast<char>(std::tolower(c)) : raw);
  }
  if (!current.empty()) tokens.push_back(std::move(current));
  return tokens;
}

Vocab::Vocab() : Vocab(std::vector<std::string>{"<pad>", "<unk>"}) {}

Vocab::Vocab(std::vector<std::string> tokens) : tokens_(std::move(tokens)) {
  for (size_t i = 0; i < tokens_.size(); ++i) {
    ids_.emplace(tokens_[i], static_cast<int>(i));
  }
}

int Vocab::Lookup(absl::string_view token) const {
  auto it = ids_.find(std::string(token));
  return it == ids_.end() ? kUnk : it->second;
}

int Vocab::AddOrLookup(absl::string_view token) {
  auto [it, inserted] =
      ids_.emplace(std::string(token), static_cast<int>(tokens_.size()));
  if (inserted) tokens_.emplace_back(token);
  return it->second;
}

std::vector<int> Vocab::Encode(absl::string_view text, bool grow) {
  std::vector<int> ids;
  for (const std::string& token : Tokenize(text)) {
    if (ids.size() == kMaxTitleTokens) break;
    ids.push_back(grow ? AddOrLookup(token) : Lookup(token));
  }
  return ids;
}

}  // namespace fedrec::ranking
