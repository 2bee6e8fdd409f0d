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

#include "kbqa/datagen.h"

#include <algorithm>
#include <set>
#include <sstream>
#include <utility>

#include "kbqa/errors.h"
#include "kbqa/logging.h"
#include "kbqa/rng.h"

namespace kbqa {

namespace {

bool IsBlank(std::string_view s) {
  return s.find_first_not_of(" \t\r\n") == std::string_view::npos;
}

bool StartsWith(std::string_view s, std::string_view prefix) {
  return s.substr(0, prefix.size()) == prefix;
}

// Reads lines, dropping '\r' and blank lines; calls fn(line, line_no).
template <typename Fn>
void ForEachLine(std::istream &in, bool skip_header, Fn fn) {
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (skip_header && line_no == 1) continue;
    if (IsBlank(line)) continue;
    fn(line, line_no);
  }
}

Tokens SplitWords(std::string_view s) {
  Tokens out;
  for (std::string_view w : split(s, ' ')) {
    if (!w.empty()) out.emplace_back(w);
  }
  return out;
}

}  // namespace

QuestionInstance QuestionInstance::make(std::string text, Fact gold) {
  QuestionInstance q;
  q.tokens = tokenize(text);
  q.text = std::move(text);
  q.gold = std::move(gold);
  return q;
}

std::string normalize_relation(std::string_view raw) {
  std::string_view s = raw;
  while (!s.empty() && (s.front() == ' ' || s.front() == '<')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '>')) s.remove_suffix(1);
  for (std::string_view scheme : {"http://", "https://"}) {
    if (StartsWith(s, scheme)) {
      s.remove_prefix(scheme.size());
      const std::size_t slash = s.find('/');
      s = slash == std::string_view::npos ? std::string_view() : s.substr(slash);
    }
  }
  if (StartsWith(s, "www.freebase.com")) s.remove_prefix(16);
  if (StartsWith(s, "/ns/")) s.remove_prefix(4);
  std::string out(s);
  if (out.find('/') == std::string::npos || StartsWith(out, "ns/")) {
    // RDF spelling: people.person.place_of_birth
    if (StartsWith(out, "ns/")) out.erase(0, 3);
    std::replace(out.begin(), out.end(), '.', '/');
  }
  if (out.empty() || out == "/") throw DataError("empty relation: '" + std::string(raw) + "'");
  if (out.front() != '/') out.insert(out.begin(), '/');
  return to_lower(out);
}

std::vector<QuestionInstance> parse_questions_tsv(std::istream &in, const std::string &source) {
  std::vector<QuestionInstance> out;
  ForEachLine(in, false, [&](const std::string &line, std::size_t line_no) {
    const auto fields = split(line, '\t');
    if (fields.size() < 4) {
      throw ParseError(source, line_no, "expected 4 tab-separated fields");
    }
    try {
      Fact gold{EntityId::parse(fields[0]), normalize_relation(fields[1]),
                EntityId::parse(fields[2])};
      out.push_back(QuestionInstance::make(std::string(fields[3]), std::move(gold)));
    } catch (const ParseError &) {
      throw;
    } catch (const DataError &e) {
      throw ParseError(source, line_no, e.what());
    }
  });
  return out;
}

std::string serialize_questions_tsv(std::span<const QuestionInstance> questions) {
  std::string out;
  for (const QuestionInstance &q : questions) {
    out += q.gold.subject.str();
    out += '\t';
    out += q.gold.relation;
    out += '\t';
    out += q.gold.object.str();
    out += '\t';
    out += q.text;
    out += '\n';
  }
  return out;
}

std::vector<std::string> spans(const LabeledQuestion &labels) {
  std::vector<std::string> out;
  std::size_t i = 0;
  const std::size_t n = std::min(labels.tokens.size(), labels.tags.size());
  while (i < n) {
    if (labels.tags[i] != Tag::kEntity) {
      ++i;
      continue;
    }
    std::size_t j = i;
    while (j < n && labels.tags[j] == Tag::kEntity) ++j;
    out.push_back(join(std::span(labels.tokens).subspan(i, j - i)));
    i = j;
  }
  return out;
}

SpanMatch best_alias_span(std::span<const std::string> tokens,
                          std::span<const std::string> aliases) {
  std::vector<std::string> keys;
  for (const std::string &a : aliases) {
    std::string key = join(tokenize(a));
    if (!key.empty()) keys.push_back(std::move(key));
  }
  if (tokens.empty() || keys.empty()) throw LabelFailure("nothing to match");

  const std::size_t n = tokens.size();
  const std::size_t max_len = n == 1 ? 1 : n - 1;
  SpanMatch best;
  bool found = false;
  // Longer grams first, then left to right; strict improvement keeps the
  // earlier (preferred) one on ties.
  for (std::size_t len = max_len; len >= 1; --len) {
    for (std::size_t start = 0; start + len <= n; ++start) {
      const std::string gram = join(tokens.subspan(start, len));
      for (const std::string &key : keys) {
        const std::size_t d = levenshtein(gram, key);
        if (!found || d < best.distance) {
          found = true;
          best.start = start;
          best.length = len;
          best.distance = d;
          best.alias = key;
        }
      }
    }
  }
  return best;
}

LabeledQuestion label_entity_span(const QuestionInstance &q,
                                  std::span<const std::string> entity_aliases) {
  const SpanMatch m = best_alias_span(q.tokens, entity_aliases);
  const std::size_t gram_chars =
      join(std::span(q.tokens).subspan(m.start, m.length)).size();
  if (m.distance >= std::max(gram_chars, m.alias.size())) {
    throw LabelFailure("no plausible entity span in '" + q.text + "'");
  }
  LabeledQuestion out;
  out.tokens = q.tokens;
  out.tags.assign(q.tokens.size(), Tag::kContext);
  for (std::size_t i = m.start; i < m.start + m.length; ++i) out.tags[i] = Tag::kEntity;
  return out;
}

std::string relation_domain(std::string_view relation) {
  std::size_t begin = relation.empty() || relation.front() != '/' ? 0 : 1;
  const std::size_t end = relation.find('/', begin);
  return std::string(relation.substr(begin, end == std::string_view::npos
                                                ? std::string_view::npos
                                                : end - begin));
}

RelationDomainTable build_relation_domains(std::span<const std::string> relations) {
  RelationDomainTable table;
  for (const std::string &r : relations) {
    if (table.domain_of.count(r)) continue;
    std::string d = relation_domain(r);
    table.members[d].push_back(r);
    table.domain_of.emplace(r, std::move(d));
  }
  for (auto &[d, rs] : table.members) std::sort(rs.begin(), rs.end());
  return table;
}

Tokens candidate_tokens(std::string_view candidate) {
  if (!candidate.empty() && candidate.front() == '/') return relation_tokens(candidate);
  return tokenize(candidate);
}

std::vector<MatchPair> gen_relation_pairs(const QuestionInstance &q,
                                          const RelationDomainTable &table) {
  std::vector<MatchPair> out;
  const std::string &gold = q.gold.relation;
  auto dom = table.domain_of.find(gold);
  if (dom == table.domain_of.end()) {
    for (int k = 0; k < kPositiveCopies; ++k) out.push_back({q.tokens, gold, 1});
    return out;
  }
  for (const std::string &r : table.members.at(dom->second)) {
    if (r == gold) {
      for (int k = 0; k < kPositiveCopies; ++k) out.push_back({q.tokens, r, 1});
    } else {
      out.push_back({q.tokens, r, 0});
    }
  }
  return out;
}

std::vector<MatchPair> gen_type_pairs(const QuestionInstance &q, const KnowledgeBase &kb,
                                      std::span<const CandidateEntity> candidates,
                                      std::span<const std::string> all_types,
                                      std::size_t negatives, Rng &rng) {
  std::vector<MatchPair> out;
  const auto gold = kb.notable_type(q.gold.subject);
  if (!gold) return out;
  for (int k = 0; k < kPositiveCopies; ++k) out.push_back({q.tokens, *gold, 1});

  std::set<std::string> used{*gold};
  for (const CandidateEntity &c : candidates) {
    if (used.size() > negatives) break;
    const auto t = kb.notable_type(c.id);
    if (t && used.insert(*t).second) out.push_back({q.tokens, *t, 0});
  }
  std::vector<std::string> rest;
  for (const std::string &t : all_types) {
    if (!used.count(t)) rest.push_back(t);
  }
  for (std::size_t k = 0; used.size() <= negatives && k < rest.size(); ++k) {
    std::swap(rest[k], rest[k + rng.index(rest.size() - k)]);
    used.insert(rest[k]);
    out.push_back({q.tokens, rest[k], 0});
  }
  return out;
}

RelationDictionary build_drr(std::span<const std::string> relations) {
  std::vector<std::string> rels(relations.begin(), relations.end());
  std::sort(rels.begin(), rels.end());
  rels.erase(std::unique(rels.begin(), rels.end()), rels.end());
  const bool truncate = rels.size() > kDrrFullLimit;

  RelationDictionary drr;
  std::vector<std::pair<std::size_t, std::size_t>> scored;  // (distance, index)
  for (std::size_t i = 0; i < rels.size(); ++i) {
    scored.clear();
    for (std::size_t j = 0; j < rels.size(); ++j) {
      if (j != i) scored.emplace_back(levenshtein(rels[i], rels[j]), j);
    }
    // rels is sorted, so index order is lexicographic order.
    std::size_t keep = scored.size();
    if (truncate && keep > kDrrTruncate) {
      keep = kDrrTruncate;
      std::partial_sort(scored.begin(), scored.begin() + keep, scored.end());
    } else {
      std::sort(scored.begin(), scored.end());
    }
    std::vector<std::string> &list = drr[rels[i]];
    list.reserve(keep);
    for (std::size_t k = 0; k < keep; ++k) list.push_back(rels[scored[k].second]);
  }
  return drr;
}

std::vector<EntityId> gen_subject_negatives(const QuestionInstance &q,
                                            std::span<const CandidateEntity> candidates,
                                            const KnowledgeBase &kb, Rng &rng) {
  const EntityId &gold = q.gold.subject;
  const std::string gold_label = kb.primary_alias(gold);
  std::vector<EntityId> pool;
  for (const CandidateEntity &c : candidates) {
    if (c.id == gold || kb.primary_alias(c.id) == gold_label) continue;
    if (std::find(pool.begin(), pool.end(), c.id) == pool.end()) pool.push_back(c.id);
  }
  if (!pool.empty()) {
    const std::size_t have = pool.size();
    while (pool.size() < kSubjectPoolSize) pool.push_back(pool[rng.index(have)]);
    return pool;
  }
  // Nothing else was retrieved: draw distinct KB subjects instead.
  std::vector<EntityId> others;
  for (const auto &[id, rec] : kb.entities()) {
    if (rec.out_degree == 0 || id == gold) continue;
    if (kb.primary_alias(id) == gold_label) continue;
    others.push_back(id);
  }
  const std::size_t take = std::min(kSubjectPoolSize, others.size());
  for (std::size_t k = 0; k < take; ++k) {
    std::swap(others[k], others[k + rng.index(others.size() - k)]);
    pool.push_back(others[k]);
  }
  return pool;
}

std::vector<std::string> gen_predicate_negatives(const QuestionInstance &q,
                                                 const KnowledgeBase &kb,
                                                 const RelationDictionary &drr) {
  const std::string &gold = q.gold.relation;
  std::vector<std::string> pool;
  for (std::string &r : kb.relations_of(q.gold.subject)) {
    if (r != gold) pool.push_back(std::move(r));
  }
  auto it = drr.find(gold);
  if (it == drr.end()) return pool;
  std::set<std::string> seen(pool.begin(), pool.end());
  for (const std::string &r : it->second) {
    if (pool.size() >= kPredicatePoolSize) break;
    if (r == gold || !seen.insert(r).second) continue;
    pool.push_back(r);
  }
  return pool;
}

NegativePools build_negative_pools(std::span<const QuestionInstance> questions,
                                   const KnowledgeBase &kb, const AliasIndex &index,
                                   std::uint64_t seed) {
  NegativePools pools;
  pools.drr = build_drr(kb.all_relations());
  pools.subject_pool.reserve(questions.size());
  pools.predicate_pool.reserve(questions.size());
  for (std::size_t i = 0; i < questions.size(); ++i) {
    Rng rng = Rng::derived(seed, i);
    const auto candidates = index.retrieve_for_question(questions[i].tokens);
    pools.subject_pool.push_back(gen_subject_negatives(questions[i], candidates, kb, rng));
    pools.predicate_pool.push_back(gen_predicate_negatives(questions[i], kb, pools.drr));
  }
  return pools;
}

TrainingSets generate_training_sets(std::span<const QuestionInstance> questions,
                                    const KnowledgeBase &kb, const AliasIndex &index,
                                    std::uint64_t seed) {
  TrainingSets sets;
  const auto relations = kb.all_relations();
  const RelationDomainTable table = build_relation_domains(relations);
  std::set<std::string> type_set;
  for (const auto &[id, rec] : kb.entities()) {
    if (rec.notable_type) type_set.insert(*rec.notable_type);
  }
  const std::vector<std::string> all_types(type_set.begin(), type_set.end());

  for (std::size_t i = 0; i < questions.size(); ++i) {
    const QuestionInstance &q = questions[i];
    const EntityRecord *rec = kb.find(q.gold.subject);
    try {
      if (rec == nullptr) throw LabelFailure("unknown subject " + q.gold.subject.str());
      sets.entity_labels.push_back(label_entity_span(q, rec->aliases));
    } catch (const LabelFailure &e) {
      ++sets.label_failures;
      KBQA_LOG(Info) << "label dropped: " << e.what();
    }
    for (MatchPair &p : gen_relation_pairs(q, table)) sets.relation_pairs.push_back(std::move(p));
    Rng type_rng = Rng::derived(~seed, i);
    const auto candidates = index.retrieve_for_question(q.tokens);
    for (MatchPair &p : gen_type_pairs(q, kb, candidates, all_types, kSubjectPoolSize, type_rng)) {
      sets.type_pairs.push_back(std::move(p));
    }
  }
  if (sets.label_failures > 0) {
    KBQA_LOG(Warning) << sets.label_failures << " question(s) could not be labeled";
  }
  sets.pools = build_negative_pools(questions, kb, index, seed);
  return sets;
}

std::string serialize_entity_labels(std::span<const LabeledQuestion> labels) {
  std::string out = "question\ttags\n";
  for (const LabeledQuestion &l : labels) {
    out += join(l.tokens);
    out += '\t';
    for (std::size_t i = 0; i < l.tags.size(); ++i) {
      if (i) out += ' ';
      out += static_cast<char>(l.tags[i]);
    }
    out += '\n';
  }
  return out;
}

std::vector<LabeledQuestion> parse_entity_labels(std::istream &in, const std::string &source) {
  std::vector<LabeledQuestion> out;
  ForEachLine(in, true, [&](const std::string &line, std::size_t line_no) {
    const auto fields = split(line, '\t');
    if (fields.size() != 2) throw ParseError(source, line_no, "expected question<TAB>tags");
    LabeledQuestion l;
    l.tokens = SplitWords(fields[0]);
    for (const std::string &t : SplitWords(fields[1])) {
      if (t == "e") {
        l.tags.push_back(Tag::kEntity);
      } else if (t == "c") {
        l.tags.push_back(Tag::kContext);
      } else {
        throw ParseError(source, line_no, "bad tag '" + t + "'");
      }
    }
    if (l.tags.size() != l.tokens.size()) {
      throw ParseError(source, line_no, "tag count does not match token count");
    }
    out.push_back(std::move(l));
  });
  return out;
}

std::string serialize_match_pairs(std::span<const MatchPair> pairs, const std::string &column) {
  std::string out = "question\t" + column + "\ttag\n";
  for (const MatchPair &p : pairs) {
    out += join(p.question);
    out += '\t';
    out += p.candidate;
    out += '\t';
    out += p.tag ? '1' : '0';
    out += '\n';
  }
  return out;
}

std::vector<MatchPair> parse_match_pairs(std::istream &in, const std::string &source) {
  std::vector<MatchPair> out;
  ForEachLine(in, true, [&](const std::string &line, std::size_t line_no) {
    const auto fields = split(line, '\t');
    if (fields.size() != 3) throw ParseError(source, line_no, "expected 3 fields");
    if (fields[2] != "0" && fields[2] != "1") throw ParseError(source, line_no, "tag must be 0 or 1");
    out.push_back({SplitWords(fields[0]), std::string(fields[1]), fields[2] == "1" ? 1 : 0});
  });
  return out;
}

std::string serialize_pools(const NegativePools &pools) {
  std::ostringstream out;
  out << "question_index\tsubject_negatives\tpredicate_negatives\n";
  for (std::size_t i = 0; i < pools.subject_pool.size(); ++i) {
    out << i << '\t';
    for (std::size_t k = 0; k < pools.subject_pool[i].size(); ++k) {
      out << (k ? " " : "") << pools.subject_pool[i][k].str();
    }
    out << '\t';
    const auto &preds = pools.predicate_pool[i];
    for (std::size_t k = 0; k < preds.size(); ++k) out << (k ? " " : "") << preds[k];
    out << '\n';
  }
  return out.str();
}

NegativePools parse_pools(std::istream &in, const std::string &source) {
  NegativePools pools;
  ForEachLine(in, true, [&](const std::string &line, std::size_t line_no) {
    const auto fields = split(line, '\t');
    if (fields.size() != 3) throw ParseError(source, line_no, "expected 3 fields");
    if (fields[0] != std::to_string(pools.subject_pool.size())) {
      throw ParseError(source, line_no, "question indices must run 0,1,2,...");
    }
    std::vector<EntityId> subjects;
    try {
      for (const std::string &w : SplitWords(fields[1])) subjects.push_back(EntityId::parse(w));
    } catch (const MalformedId &e) {
      throw ParseError(source, line_no, e.what());
    }
    pools.subject_pool.push_back(std::move(subjects));
    pools.predicate_pool.push_back(SplitWords(fields[2]));
  });
  return pools;
}

}  // namespace kbqa
