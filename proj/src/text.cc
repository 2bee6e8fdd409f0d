// Copyright 2026 The kbqa Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "kbqa/text.h"

#include <algorithm>
#include <cctype>
#include <set>

namespace kbqa {

namespace {

bool IsPunct(char c) {
  return std::ispunct(static_cast<unsigned char>(c)) != 0;
}

bool IsSpace(char c) {
  return std::isspace(static_cast<unsigned char>(c)) != 0;
}

}  // namespace

std::string to_lower(std::string_view text) {
  std::string out(text);
  for (char &c : out) {
    c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  }
  return out;
}

Tokens tokenize(std::string_view text) {
  Tokens tokens;
  std::size_t i = 0;
  const std::size_t n = text.size();
  while (i < n) {
    while (i < n && IsSpace(text[i])) ++i;
    std::size_t start = i;
    while (i < n && !IsSpace(text[i])) ++i;
    if (start == i) break;
    std::string word = to_lower(text.substr(start, i - start));

    std::size_t lead = 0;
    while (lead < word.size() && IsPunct(word[lead])) ++lead;
    if (lead == word.size()) {
      tokens.push_back(std::move(word));
      continue;
    }
    std::size_t trail = word.size();
    while (trail > lead && IsPunct(word[trail - 1])) --trail;
    if (lead > 0) tokens.push_back(word.substr(0, lead));
    tokens.push_back(word.substr(lead, trail - lead));
    if (trail < word.size()) tokens.push_back(word.substr(trail));
  }
  return tokens;
}

std::vector<std::string_view> split(std::string_view text, char sep) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (true) {
    const std::size_t j = text.find(sep, i);
    if (j == std::string_view::npos) {
      out.push_back(text.substr(i));
      return out;
    }
    out.push_back(text.substr(i, j - i));
    i = j + 1;
  }
}

std::string join(std::span<const std::string> tokens, std::string_view sep) {
  std::string out;
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    if (i > 0) out += sep;
    out += tokens[i];
  }
  return out;
}

Tokens relation_tokens(std::string_view relation) {
  Tokens out;
  std::size_t i = 0;
  while (i <= relation.size()) {
    std::size_t j = relation.find('/', i);
    if (j == std::string_view::npos) j = relation.size();
    if (j > i) out.push_back(to_lower(relation.substr(i, j - i)));
    i = j + 1;
  }
  return out;
}

std::vector<std::string> NGramSet::strings() const {
  std::vector<std::string> out;
  out.reserve(grams.size());
  for (const auto &g : grams) out.push_back(join(g));
  return out;
}

bool contains_run(std::span<const std::string> haystack,
                  std::span<const std::string> needle) {
  if (needle.size() > haystack.size()) return false;
  if (needle.empty()) return true;
  for (std::size_t s = 0; s + needle.size() <= haystack.size(); ++s) {
    if (std::equal(needle.begin(), needle.end(), haystack.begin() + s)) {
      return true;
    }
  }
  return false;
}

NGramSet extract_ngrams(std::span<const std::string> tokens, int max_n) {
  NGramSet result;
  if (max_n < 1 || tokens.empty()) return result;
  const std::size_t top =
      std::min<std::size_t>(static_cast<std::size_t>(max_n), tokens.size());

  // Every gram shorter than `top` sits inside some gram of length `top`, so
  // only the longest runs survive pruning. Repeats collapse to one entry.
  std::set<Tokens> seen;
  for (std::size_t s = 0; s + top <= tokens.size(); ++s) {
    Tokens gram(tokens.begin() + s, tokens.begin() + s + top);
    if (seen.insert(gram).second) result.grams.push_back(std::move(gram));
  }
  return result;
}

std::vector<Tokens> all_ngrams(std::span<const std::string> tokens, int max_n) {
  std::vector<Tokens> out;
  std::set<Tokens> seen;
  const std::size_t top =
      std::min<std::size_t>(static_cast<std::size_t>(std::max(max_n, 0)),
                            tokens.size());
  for (std::size_t len = top; len >= 1; --len) {
    for (std::size_t s = 0; s + len <= tokens.size(); ++s) {
      Tokens gram(tokens.begin() + s, tokens.begin() + s + len);
      if (seen.insert(gram).second) out.push_back(std::move(gram));
    }
  }
  return out;
}

std::size_t levenshtein(std::string_view a, std::string_view b) {
  if (a.size() < b.size()) std::swap(a, b);
  std::vector<std::size_t> prev(b.size() + 1), curr(b.size() + 1);
  for (std::size_t j = 0; j <= b.size(); ++j) prev[j] = j;
  for (std::size_t i = 0; i < a.size(); ++i) {
    curr[0] = i + 1;
    for (std::size_t j = 0; j < b.size(); ++j) {
      const std::size_t sub = prev[j] + (a[i] == b[j] ? 0 : 1);
      curr[j + 1] = std::min({prev[j + 1] + 1, curr[j] + 1, sub});
    }
    std::swap(prev, curr);
  }
  return prev[b.size()];
}

}  // namespace kbqa
