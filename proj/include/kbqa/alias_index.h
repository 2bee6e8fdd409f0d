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

#ifndef KBQA_ALIAS_INDEX_H_
#define KBQA_ALIAS_INDEX_H_

#include <cstddef>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "kbqa/kb_store.h"
#include "kbqa/text.h"

namespace kbqa {

// A retrieved entity with its weight components: score = n / (l * c), where
// n is the word count of the matching gram, l the word count of the matched
// alias and c the number of entities in the candidate set.
struct CandidateEntity {
  EntityId id;
  std::string matched_alias;
  std::size_t n = 0;
  std::size_t l = 0;
  std::size_t c = 0;

  double score() const {
    return static_cast<double>(n) / (static_cast<double>(l) * static_cast<double>(c));
  }
};

// Strict weak order: higher score first (compared exactly as rationals), then
// smaller id.
bool candidate_before(const CandidateEntity &a, const CandidateEntity &b);

class AliasIndex {
 public:
  struct Posting {
    EntityId id;
    std::string alias;
    std::size_t alias_words = 0;
  };

  AliasIndex() = default;

  // Exact keys are the token-normalized full aliases; gram keys are every
  // 1..3-gram of every alias.
  static AliasIndex build(const KnowledgeBase &kb);

  std::span<const EntityId> exact(std::string_view key) const;
  std::span<const Posting> postings(std::string_view gram) const;
  std::size_t num_exact_keys() const { return exact_.size(); }
  std::size_t num_gram_keys() const { return grams_.size(); }
  bool empty() const { return exact_.empty(); }

  // Candidates for an entity-text fragment. Exact alias matches win outright;
  // otherwise the pruned 1..3-grams of the fragment are looked up and each
  // hit is weighted by its longest matching gram.
  std::vector<CandidateEntity> retrieve(std::string_view span_text) const;

  // Candidates for a whole question (no entity detection): every n-gram of
  // the question is looked up, unpruned. At most `limit` candidates are kept.
  std::vector<CandidateEntity> retrieve_for_question(std::span<const std::string> tokens,
                                                     std::size_t limit = 64) const;

  void write(BinaryWriter &out) const;
  static AliasIndex read(BinaryReader &in);

 private:
  std::map<std::string, std::vector<EntityId>, std::less<>> exact_;
  std::map<std::string, std::vector<Posting>, std::less<>> grams_;
};

// Free-function spellings of the index operations.
inline AliasIndex build_index(const KnowledgeBase &kb) { return AliasIndex::build(kb); }
inline std::vector<CandidateEntity> retrieve_candidates(const AliasIndex &index,
                                                        std::string_view span_text) {
  return index.retrieve(span_text);
}

}  // namespace kbqa

#endif  // KBQA_ALIAS_INDEX_H_
