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

#include "kbqa/alias_index.h"

#include <algorithm>

#include "kbqa/binary_io.h"

namespace kbqa {

namespace {

constexpr int kMaxGram = 3;
constexpr std::size_t kMaxQuestionGram = 8;

// Best hit for one entity during gram retrieval.
struct Hit {
  std::size_t n = 0;
  std::size_t l = 0;
  std::string alias;
};

// Prefers the longer gram, then the shorter alias, then the smaller alias.
bool Better(std::size_t n, std::size_t l, const std::string &alias, const Hit &cur) {
  if (n != cur.n) return n > cur.n;
  // Compare n/l at equal n: shorter alias scores higher.
  if (l != cur.l) return l < cur.l;
  return alias < cur.alias;
}

std::vector<CandidateEntity> Finish(std::map<EntityId, Hit> hits) {
  std::vector<CandidateEntity> out;
  out.reserve(hits.size());
  for (auto &[id, hit] : hits) {
    out.push_back(CandidateEntity{id, std::move(hit.alias), hit.n, hit.l, hits.size()});
  }
  std::sort(out.begin(), out.end(), candidate_before);
  return out;
}

}  // namespace

bool candidate_before(const CandidateEntity &a, const CandidateEntity &b) {
  // a.n / (a.l a.c) > b.n / (b.l b.c)  <=>  a.n b.l b.c > b.n a.l a.c
  const unsigned long long lhs = 1ULL * a.n * b.l * b.c;
  const unsigned long long rhs = 1ULL * b.n * a.l * a.c;
  if (lhs != rhs) return lhs > rhs;
  return a.id < b.id;
}

AliasIndex AliasIndex::build(const KnowledgeBase &kb) {
  AliasIndex index;
  for (const auto &[id, rec] : kb.entities()) {
    for (const std::string &alias : rec.aliases) {
      const Tokens tokens = tokenize(alias);
      if (tokens.empty()) continue;
      auto &bucket = index.exact_[join(tokens)];
      if (bucket.empty() || bucket.back() != id) bucket.push_back(id);
      for (const Tokens &gram : all_ngrams(tokens, kMaxGram)) {
        auto &list = index.grams_[join(gram)];
        list.push_back(Posting{id, alias, tokens.size()});
      }
    }
  }
  // Entities are visited in id order, so buckets are already sorted; drop
  // repeats that arise when two aliases normalize to the same key.
  for (auto &[key, ids] : index.exact_) {
    ids.erase(std::unique(ids.begin(), ids.end()), ids.end());
  }
  return index;
}

std::span<const EntityId> AliasIndex::exact(std::string_view key) const {
  auto it = exact_.find(key);
  if (it == exact_.end()) return {};
  return it->second;
}

std::span<const AliasIndex::Posting> AliasIndex::postings(std::string_view gram) const {
  auto it = grams_.find(gram);
  if (it == grams_.end()) return {};
  return it->second;
}

std::vector<CandidateEntity> AliasIndex::retrieve(std::string_view span_text) const {
  const Tokens tokens = tokenize(span_text);
  if (tokens.empty()) return {};
  const std::string key = join(tokens);

  auto bucket = exact(key);
  if (!bucket.empty()) {
    std::vector<CandidateEntity> out;
    for (const EntityId &id : bucket) {
      out.push_back(CandidateEntity{id, key, tokens.size(), tokens.size(), bucket.size()});
    }
    std::sort(out.begin(), out.end(), candidate_before);
    return out;
  }

  std::map<EntityId, Hit> hits;
  for (const Tokens &gram : extract_ngrams(tokens, kMaxGram).grams) {
    for (const Posting &p : postings(join(gram))) {
      auto it = hits.find(p.id);
      if (it == hits.end()) {
        hits.emplace(p.id, Hit{gram.size(), p.alias_words, p.alias});
      } else if (Better(gram.size(), p.alias_words, p.alias, it->second)) {
        it->second = Hit{gram.size(), p.alias_words, p.alias};
      }
    }
  }
  return Finish(std::move(hits));
}

std::vector<CandidateEntity> AliasIndex::retrieve_for_question(
    std::span<const std::string> tokens, std::size_t limit) const {
  std::map<EntityId, Hit> hits;
  auto offer = [&](const EntityId &id, std::size_t n, std::size_t l, const std::string &alias) {
    auto it = hits.find(id);
    if (it == hits.end()) {
      hits.emplace(id, Hit{n, l, alias});
      return;
    }
    // At a shared c, the better hit is the larger n / l.
    const Hit &cur = it->second;
    if (n * cur.l > cur.n * l || (n * cur.l == cur.n * l && Better(n, l, alias, cur))) {
      it->second = Hit{n, l, alias};
    }
  };

  for (const Tokens &gram : all_ngrams(tokens, static_cast<int>(kMaxQuestionGram))) {
    const std::string key = join(gram);
    for (const EntityId &id : exact(key)) offer(id, gram.size(), gram.size(), key);
    if (gram.size() > static_cast<std::size_t>(kMaxGram)) continue;
    for (const Posting &p : postings(key)) offer(p.id, gram.size(), p.alias_words, p.alias);
  }
  auto out = Finish(std::move(hits));
  if (out.size() > limit) out.resize(limit);
  return out;
}

void AliasIndex::write(BinaryWriter &out) const {
  out.u64(exact_.size());
  for (const auto &[key, ids] : exact_) {
    out.str(key);
    out.u64(ids.size());
    for (const EntityId &id : ids) out.str(id.str());
  }
  out.u64(grams_.size());
  for (const auto &[gram, list] : grams_) {
    out.str(gram);
    out.u64(list.size());
    for (const Posting &p : list) {
      out.str(p.id.str());
      out.str(p.alias);
      out.u64(p.alias_words);
    }
  }
}

AliasIndex AliasIndex::read(BinaryReader &in) {
  AliasIndex index;
  const std::uint64_t ne = in.u64();
  for (std::uint64_t i = 0; i < ne; ++i) {
    std::string key = in.str();
    auto &ids = index.exact_[key];
    const std::uint64_t n = in.u64();
    for (std::uint64_t j = 0; j < n; ++j) ids.push_back(EntityId::parse(in.str()));
  }
  const std::uint64_t ng = in.u64();
  for (std::uint64_t i = 0; i < ng; ++i) {
    std::string gram = in.str();
    auto &list = index.grams_[gram];
    const std::uint64_t n = in.u64();
    for (std::uint64_t j = 0; j < n; ++j) {
      Posting p;
      p.id = EntityId::parse(in.str());
      p.alias = in.str();
      p.alias_words = in.u64();
      list.push_back(std::move(p));
    }
  }
  return index;
}

}  // namespace kbqa
