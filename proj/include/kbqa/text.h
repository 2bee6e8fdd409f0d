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

#ifndef KBQA_TEXT_H_
#define KBQA_TEXT_H_

#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace kbqa {

using Tokens = std::vector<std::string>;

std::string to_lower(std::string_view text);

// Lowercases, splits on whitespace, and peels leading and trailing runs of
// ASCII punctuation off each word as separate tokens. A word made only of
// punctuation stays one token ("....." -> ".....").
Tokens tokenize(std::string_view text);

// Splits on every `sep`; empty fields are kept.
std::vector<std::string_view> split(std::string_view text, char sep);

std::string join(std::span<const std::string> tokens, std::string_view sep = " ");

// "/music/album/genre" -> [music, album, genre]. Underscores are kept.
Tokens relation_tokens(std::string_view relation);

// Contiguous token runs of length 1..max_n with every gram that is contained
// (as a contiguous token run) in another gram of the set removed. Grams are
// ordered by start position, longer first on equal start.
struct NGramSet {
  std::vector<Tokens> grams;

  std::vector<std::string> strings() const;
  bool empty() const { return grams.empty(); }
  std::size_t size() const { return grams.size(); }
};

NGramSet extract_ngrams(std::span<const std::string> tokens, int max_n = 3);

// All contiguous runs of length 1..max_n, no pruning, in (length desc, start
// asc) order. Duplicates are dropped.
std::vector<Tokens> all_ngrams(std::span<const std::string> tokens, int max_n);

// True if `needle` occurs as a contiguous run inside `haystack`.
bool contains_run(std::span<const std::string> haystack,
                  std::span<const std::string> needle);

// Character-level Levenshtein distance (unit costs) over bytes.
std::size_t levenshtein(std::string_view a, std::string_view b);

}  // namespace kbqa

#endif  // KBQA_TEXT_H_
