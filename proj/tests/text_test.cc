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

#include <algorithm>
#include <set>
#include <string>
#include <vector>

#include "doctest.h"
#include "kbqa/rng.h"
#include "kbqa/text.h"

namespace kbqa {
namespace {

// Plain recursive edit distance with memo; independent of the rolling-row
// version under test.
std::size_t EditOracle(const std::string &a, const std::string &b) {
  std::vector<std::vector<long>> memo(a.size() + 1, std::vector<long>(b.size() + 1, -1));
  auto go = [&](auto &&self, std::size_t i, std::size_t j) -> long {
    if (i == a.size()) return static_cast<long>(b.size() - j);
    if (j == b.size()) return static_cast<long>(a.size() - i);
    long &m = memo[i][j];
    if (m >= 0) return m;
    long best = self(self, i + 1, j + 1) + (a[i] == b[j] ? 0 : 1);
    best = std::min(best, self(self, i + 1, j) + 1);
    best = std::min(best, self(self, i, j + 1) + 1);
    return m = best;
  };
  return static_cast<std::size_t>(go(go, 0, 0));
}

// Every positional 1..3-gram, then drop any gram that occurs inside a longer
// one.
std::set<std::string> PrunedOracle(const Tokens &t, std::size_t max_n) {
  std::vector<Tokens> all;
  for (std::size_t n = 1; n <= max_n; ++n) {
    for (std::size_t s = 0; s + n <= t.size(); ++s) {
      all.emplace_back(t.begin() + s, t.begin() + s + n);
    }
  }
  std::set<std::string> keep;
  for (const Tokens &g : all) {
    bool inside = false;
    for (const Tokens &h : all) {
      if (h.size() <= g.size()) continue;
      for (std::size_t s = 0; s + g.size() <= h.size() && !inside; ++s) {
        inside = std::equal(g.begin(), g.end(), h.begin() + s);
      }
      if (inside) break;
    }
    if (!inside) keep.insert(join(g));
  }
  return keep;
}

TEST_SUITE("text") {
  TEST_CASE("tokenize splits edge punctuation") {
    const Tokens t = tokenize("Which genre of album is harder ..... faster?");
    CHECK(t == Tokens{"which", "genre", "of", "album", "is", "harder", ".....", "faster", "?"});
    CHECK(tokenize("").empty());
    CHECK(tokenize("   ").empty());
    CHECK(tokenize("Obama") == Tokens{"obama"});
    CHECK(tokenize("(hi), there") == Tokens{"(", "hi", "),", "there"});
    CHECK(tokenize("o'neil") == Tokens{"o'neil"});
  }

  TEST_CASE("relation tokens") {
    CHECK(relation_tokens("/music/album/genre") == Tokens{"music", "album", "genre"});
    CHECK(relation_tokens("/People/Person/place_of_birth") ==
          Tokens{"people", "person", "place_of_birth"});
    CHECK(relation_tokens("").empty());
  }

  TEST_CASE("split keeps empty fields") {
    const auto f = split("a\t\tb", '\t');
    REQUIRE(f.size() == 3);
    CHECK(f[1].empty());
    CHECK(split("", ',').size() == 1);
  }

  TEST_CASE("extract_ngrams examples") {
    CHECK(extract_ngrams(Tokens{"a"}).strings() == std::vector<std::string>{"a"});
    CHECK(extract_ngrams(Tokens{"a", "b"}).strings() == std::vector<std::string>{"a b"});
    CHECK(extract_ngrams(Tokens{"a", "b", "c", "d"}).strings() ==
          std::vector<std::string>{"a b c", "b c d"});
    CHECK(extract_ngrams(Tokens{}).empty());
    CHECK(extract_ngrams(Tokens{"a", "b", "c"}, 1).strings() ==
          std::vector<std::string>{"a", "b", "c"});
  }

  TEST_CASE("extract_ngrams matches the quadratic pruning oracle") {
    Rng rng(11);
    const std::vector<std::string> alphabet = {"a", "b", "c", "d"};
    for (int trial = 0; trial < 300; ++trial) {
      Tokens t(rng.index(13));
      for (auto &w : t) w = alphabet[rng.index(alphabet.size())];
      const NGramSet got = extract_ngrams(t);
      const auto strs = got.strings();
      const std::set<std::string> as_set(strs.begin(), strs.end());
      CHECK(as_set.size() == strs.size());
      CHECK(as_set == PrunedOracle(t, 3));
      for (const Tokens &g : got.grams) {
        for (const Tokens &h : got.grams) {
          if (g != h) CHECK_FALSE(contains_run(h, g));
        }
      }
    }
  }

  TEST_CASE("all_ngrams lists every distinct run, longest first") {
    const auto g = all_ngrams(Tokens{"a", "b", "a"}, 3);
    std::vector<std::string> s;
    for (const auto &x : g) s.push_back(join(x));
    CHECK(s == std::vector<std::string>{"a b a", "a b", "b a", "a", "b"});
  }

  TEST_CASE("levenshtein hand values and oracle") {
    CHECK(levenshtein("album", "albums") == 1);
    CHECK(levenshtein("kitten", "sitting") == 3);
    CHECK(levenshtein("", "abc") == 3);
    CHECK(levenshtein("a", "xyz") == 3);
    CHECK(levenshtein("a", "ab") == 1);
    Rng rng(5);
    for (int trial = 0; trial < 300; ++trial) {
      std::string a(rng.index(9), 'a'), b(rng.index(9), 'a');
      for (char &c : a) c = static_cast<char>('a' + rng.index(3));
      for (char &c : b) c = static_cast<char>('a' + rng.index(3));
      CHECK(levenshtein(a, b) == EditOracle(a, b));
      CHECK(levenshtein(a, b) == levenshtein(b, a));
    }
  }
}

}  // namespace
}  // namespace kbqa
