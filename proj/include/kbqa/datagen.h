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

#ifndef KBQA_DATAGEN_H_
#define KBQA_DATAGEN_H_

#include <cstddef>
#include <cstdint>
#include <istream>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "kbqa/alias_index.h"
#include "kbqa/kb_store.h"
#include "kbqa/text.h"

namespace kbqa {

class Rng;

struct QuestionInstance {
  std::string text;
  Fact gold;
  Tokens tokens;  // tokenize(text)

  static QuestionInstance make(std::string text, Fact gold);
};

// "www.freebase.com/people/person/place_of_birth" -> "/people/person/place_of_birth"
std::string normalize_relation(std::string_view raw);

// SimpleQuestions layout: subject<TAB>relation<TAB>object<TAB>question.
std::vector<QuestionInstance> parse_questions_tsv(std::istream &in,
                                                  const std::string &source = "");
std::string serialize_questions_tsv(std::span<const QuestionInstance> questions);

enum class Tag : char { kEntity = 'e', kContext = 'c' };

struct LabeledQuestion {
  Tokens tokens;
  std::vector<Tag> tags;
};

// Maximal runs of 'e' tags, space-joined.
std::vector<std::string> spans(const LabeledQuestion &labels);

struct SpanMatch {
  std::size_t start = 0;
  std::size_t length = 0;
  std::size_t distance = 0;
  std::string alias;
};

// Best 1..(n-1)-gram of `tokens` against any alias by character Levenshtein
// distance. Ties prefer the longer gram, then the earlier one. A one-token
// question offers its single token.
SpanMatch best_alias_span(std::span<const std::string> tokens,
                          std::span<const std::string> aliases);

// Tags the best-matching gram 'e' and everything else 'c'. Throws
// LabelFailure when there is nothing to match or when the best match had to
// rewrite every character (distance >= the longer string's length).
LabeledQuestion label_entity_span(const QuestionInstance &q,
                                  std::span<const std::string> entity_aliases);

std::string relation_domain(std::string_view relation);

struct RelationDomainTable {
  std::map<std::string, std::string> domain_of;
  std::map<std::string, std::vector<std::string>> members;  // sorted relations

  std::size_t num_domains() const { return members.size(); }
};

RelationDomainTable build_relation_domains(std::span<const std::string> relations);

// (question, candidate, tag) training example for a binary matcher. The
// candidate is a relation ("/music/album/genre") or a notable-type label.
struct MatchPair {
  Tokens question;
  std::string candidate;
  int tag = 0;
};

// Relations split on '/', anything else tokenized as text.
Tokens candidate_tokens(std::string_view candidate);

inline constexpr int kPositiveCopies = 3;

// Pairs the question with every relation of the gold relation's domain;
// the gold pair is emitted kPositiveCopies times.
std::vector<MatchPair> gen_relation_pairs(const QuestionInstance &q,
                                          const RelationDomainTable &table);

// Question/notable-type pairs: the gold subject's type (kPositiveCopies
// times) against up to `negatives` other types, candidates' types first.
std::vector<MatchPair> gen_type_pairs(const QuestionInstance &q, const KnowledgeBase &kb,
                                      std::span<const CandidateEntity> candidates,
                                      std::span<const std::string> all_types,
                                      std::size_t negatives, Rng &rng);

using RelationDictionary = std::map<std::string, std::vector<std::string>>;

inline constexpr std::size_t kDrrFullLimit = 2000;
inline constexpr std::size_t kDrrTruncate = 200;

// For each relation, every other relation by ascending edit distance (ties
// lexicographic). Above kDrrFullLimit relations each list keeps the nearest
// kDrrTruncate.
RelationDictionary build_drr(std::span<const std::string> relations);

inline constexpr std::size_t kSubjectPoolSize = 5;
inline constexpr std::size_t kPredicatePoolSize = 50;

// Candidates minus the gold subject and subjects sharing its label. A pool
// below kSubjectPoolSize is padded by resampling its own members; an empty
// pool falls back to distinct random KB subjects with a different label.
std::vector<EntityId> gen_subject_negatives(const QuestionInstance &q,
                                            std::span<const CandidateEntity> candidates,
                                            const KnowledgeBase &kb, Rng &rng);

// The gold subject's other relations, topped up from the gold relation's
// dictionary entry until kPredicatePoolSize.
std::vector<std::string> gen_predicate_negatives(const QuestionInstance &q,
                                                 const KnowledgeBase &kb,
                                                 const RelationDictionary &drr);

struct NegativePools {
  RelationDictionary drr;
  std::vector<std::vector<EntityId>> subject_pool;      // per question
  std::vector<std::vector<std::string>> predicate_pool;  // per question
};

// Question i draws from Rng::derived(seed, i).
NegativePools build_negative_pools(std::span<const QuestionInstance> questions,
                                   const KnowledgeBase &kb, const AliasIndex &index,
                                   std::uint64_t seed);

// Everything gen-data writes, in memory.
struct TrainingSets {
  std::vector<LabeledQuestion> entity_labels;
  std::vector<MatchPair> relation_pairs;
  std::vector<MatchPair> type_pairs;
  NegativePools pools;
  std::size_t label_failures = 0;
};

TrainingSets generate_training_sets(std::span<const QuestionInstance> questions,
                                    const KnowledgeBase &kb, const AliasIndex &index,
                                    std::uint64_t seed);

// TSV files with a one-line header.
std::string serialize_entity_labels(std::span<const LabeledQuestion> labels);
std::vector<LabeledQuestion> parse_entity_labels(std::istream &in, const std::string &source = "");
std::string serialize_match_pairs(std::span<const MatchPair> pairs, const std::string &column);
std::vector<MatchPair> parse_match_pairs(std::istream &in, const std::string &source = "");
std::string serialize_pools(const NegativePools &pools);
NegativePools parse_pools(std::istream &in, const std::string &source = "");

}  // namespace kbqa

#endif  // KBQA_DATAGEN_H_
