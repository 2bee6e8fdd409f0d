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
#include <sstream>
#include <string>
#include <vector>

#include "doctest.h"
#include "kbqa/alias_index.h"
#include "kbqa/datagen.h"
#include "kbqa/errors.h"
#include "kbqa/rng.h"
#include "kbqa/synthetic.h"
#include "oracles.h"

namespace kbqa {
namespace {

EntityId Id(const std::string &s) { return EntityId::parse(s); }

std::vector<Tag> Tags(const std::string &s) {
  std::vector<Tag> out;
  for (char c : s) out.push_back(static_cast<Tag>(c));
  return out;
}

QuestionInstance Q(const std::string &text, const std::string &rel = "/people/person/place_of_birth",
                   const std::string &subject = "m.g") {
  return QuestionInstance::make(text, make_fact(subject, rel, "m.o"));
}

TEST_SUITE("datagen") {
  TEST_CASE("normalize_relation spellings") {
    CHECK(normalize_relation("www.freebase.com/people/person/place_of_birth") ==
          "/people/person/place_of_birth");
    CHECK(normalize_relation("/music/album/genre") == "/music/album/genre");
    CHECK(normalize_relation("http://rdf.freebase.com/ns/people.person.place_of_birth") ==
          "/people/person/place_of_birth");
    CHECK(normalize_relation("people.person.nationality") == "/people/person/nationality");
    CHECK_THROWS_AS(normalize_relation(""), DataError);
  }

  TEST_CASE("questions tsv") {
    std::istringstream in(
        "www.freebase.com/m/02mjmr\twww.freebase.com/people/person/place_of_birth\t"
        "www.freebase.com/m/02hrh0_\twhere was obama born\n\n");
    const auto qs = parse_questions_tsv(in);
    REQUIRE(qs.size() == 1);
    CHECK(qs[0].gold == make_fact("m.02mjmr", "/people/person/place_of_birth", "m.02hrh0_"));
    CHECK(qs[0].tokens == tokenize(qs[0].text));
    std::istringstream back(serialize_questions_tsv(qs));
    const auto again = parse_questions_tsv(back);
    REQUIRE(again.size() == 1);
    CHECK(again[0].gold == qs[0].gold);
    CHECK(again[0].text == qs[0].text);
    std::istringstream bad("m.a\t/r/r\tm.b\n");
    CHECK_THROWS_AS(parse_questions_tsv(bad), ParseError);
  }

  TEST_CASE("entity span labeling examples") {
    const std::string obama[] = {"obama"};
    CHECK(label_entity_span(Q("where was obama born ?"), obama).tags == Tags("ccecc"));

    const std::string album[] = {"album"};
    const auto plural = label_entity_span(Q("which albums did he make"), album);
    CHECK(plural.tags == Tags("ceccc"));
    CHECK(levenshtein("album", "albums") == 1);

    const std::string whole[] = {"who wrote the book"};
    CHECK(label_entity_span(Q("who wrote the book ?"), whole).tags == Tags("eeeec"));

    const std::string unrelated[] = {"zz"};
    CHECK_THROWS_AS(label_entity_span(Q("xx yy"), unrelated), LabelFailure);
    CHECK_THROWS_AS(label_entity_span(Q("where"), std::span<const std::string>{}), LabelFailure);
    CHECK_THROWS_AS(label_entity_span(Q(""), obama), LabelFailure);
  }

  TEST_CASE("spans are maximal entity runs") {
    LabeledQuestion lq{{"a", "b", "c", "d"}, Tags("ceec")};
    CHECK(spans(lq) == std::vector<std::string>{"b c"});
    lq.tags = Tags("cccc");
    CHECK(spans(lq).empty());
    lq = {{"a", "b", "c"}, Tags("ece")};
    CHECK(spans(lq) == std::vector<std::string>{"a", "c"});
  }

  TEST_CASE("labeling agrees with the all-grams oracle") {
    Rng rng(31);
    const std::vector<std::string> words = {"ab", "ba", "abc", "c", "bb", "ca"};
    for (int trial = 0; trial < 400; ++trial) {
      Tokens t(2 + rng.index(7));
      for (auto &w : t) w = words[rng.index(words.size())];
      std::vector<std::string> aliases(1 + rng.index(2));
      for (auto &a : aliases) {
        a = words[rng.index(words.size())];
        if (rng.bernoulli(0.5)) a += " " + words[rng.index(words.size())];
      }
      const SpanMatch got = best_alias_span(t, aliases);
      const SpanMatch want = oracle::best_span(t, aliases);
      CHECK(got.start == want.start);
      CHECK(got.length == want.length);
      CHECK(got.distance == want.distance);
      CHECK(got.length < t.size());
    }
  }

  TEST_CASE("relation domains") {
    const std::vector<std::string> rels = {"/music/album/genre", "/people/person/place_of_birth",
                                           "/music/artist/label", "/film/film/genre"};
    const RelationDomainTable t = build_relation_domains(rels);
    CHECK(t.domain_of.at("/music/album/genre") == "music");
    CHECK(t.domain_of.at("/people/person/place_of_birth") == "people");
    CHECK(t.num_domains() == 3);
    CHECK(t.members.at("music") ==
          std::vector<std::string>{"/music/album/genre", "/music/artist/label"});
    CHECK(relation_domain("/a") == "a");
  }

  TEST_CASE("relation pairs") {
    const std::vector<std::string> rels = {"/d/a/x1", "/d/a/x2", "/d/b/x3", "/d/b/x4", "/d/c/x5",
                                           "/e/a/only"};
    const RelationDomainTable t = build_relation_domains(rels);
    const auto pairs = gen_relation_pairs(Q("q", "/d/b/x3"), t);
    CHECK(pairs.size() == 7);
    std::map<std::string, std::size_t> seen;
    for (const MatchPair &p : pairs) {
      CHECK((p.tag == 0 || p.tag == 1));
      CHECK(p.tag == (p.candidate == "/d/b/x3" ? 1 : 0));
      ++seen[p.candidate];
    }
    CHECK(seen["/d/b/x3"] == 3);
    for (const std::string &r : t.members.at("d")) CHECK(seen.count(r) == 1);
    CHECK(seen.size() == 5);

    const auto solo = gen_relation_pairs(Q("q", "/e/a/only"), t);
    CHECK(solo.size() == 3);
    for (const MatchPair &p : solo) CHECK(p.tag == 1);
    CHECK(candidate_tokens("/music/album/genre") == Tokens{"music", "album", "genre"});
    CHECK(candidate_tokens("Musical Recording") == Tokens{"musical", "recording"});
  }

  TEST_CASE("relation dictionary") {
    const std::vector<std::string> rels = {"a", "ab", "xyz"};
    const RelationDictionary d = build_drr(rels);
    CHECK(d.at("a") == std::vector<std::string>{"ab", "xyz"});
    for (const auto &[k, row] : d) {
      CHECK(std::find(row.begin(), row.end(), k) == row.end());
      CHECK(row.size() == rels.size() - 1);
    }
  }

  TEST_CASE("relation dictionary matches a brute-force sort") {
    Rng rng(8);
    for (int trial = 0; trial < 5; ++trial) {
      std::set<std::string> uniq;
      const std::size_t n = 20 + rng.index(81);
      while (uniq.size() < n) {
        std::string r = "/";
        const std::size_t len = 3 + rng.index(10);
        for (std::size_t i = 0; i < len; ++i) r += static_cast<char>('a' + rng.index(4));
        uniq.insert(r);
      }
      const std::vector<std::string> rels(uniq.begin(), uniq.end());
      const RelationDictionary d = build_drr(rels);
      for (const std::string &r : rels) CHECK(d.at(r) == oracle::drr_row(rels, r));
    }
  }

  TEST_CASE("subject negatives pad from the filtered candidates") {
    const KnowledgeBase kb =
        build_kb({make_fact("m.g", "/r/r/a", "m.o"), make_fact("m.d", "/r/r/a", "m.o"),
                  make_fact("m.x", "/r/r/b", "m.o"), make_fact("m.y", "/r/r/c", "m.o")},
                 {{Id("m.g"), "obama"}, {Id("m.d"), "obama"}, {Id("m.x"), "obama fan"},
                  {Id("m.y"), "obama care"}},
                 {});
    const AliasIndex index = build_index(kb);
    const auto cands = index.retrieve_for_question(tokenize("obama care fan"));
    REQUIRE(cands.size() == 4);
    Rng rng(3);
    const auto neg = gen_subject_negatives(Q("where was obama born", "/r/r/a", "m.g"), cands, kb, rng);
    CHECK(neg.size() == kSubjectPoolSize);
    std::set<EntityId> distinct(neg.begin(), neg.end());
    CHECK(distinct == std::set<EntityId>{Id("m.x"), Id("m.y")});

    // Nothing retrieved besides the gold: fall back to other KB subjects.
    const CandidateEntity only[] = {{Id("m.g"), "obama", 1, 1, 1}};
    const auto fb = gen_subject_negatives(Q("q", "/r/r/a", "m.g"), only, kb, rng);
    std::set<EntityId> fbs(fb.begin(), fb.end());
    CHECK(fbs == std::set<EntityId>{Id("m.x"), Id("m.y")});
  }

  TEST_CASE("predicate negatives: natural ones first, then the dictionary") {
    std::vector<Fact> facts;
    std::vector<std::string> rels;
    for (int i = 0; i < 60; ++i) {
      rels.push_back("/d/x/r" + std::to_string(100 + i));
      facts.push_back(make_fact("m.other", rels.back(), "m.o"));
    }
    facts.push_back(make_fact("m.g", rels[0], "m.o"));
    facts.push_back(make_fact("m.g", rels[7], "m.o"));
    facts.push_back(make_fact("m.g", rels[9], "m.o"));
    const KnowledgeBase kb = build_kb(facts, {}, {});
    const RelationDictionary d = build_drr(kb.all_relations());
    const auto pool = gen_predicate_negatives(Q("q", rels[0]), kb, d);
    CHECK(pool.size() == kPredicatePoolSize);
    CHECK(pool[0] == rels[7]);
    CHECK(pool[1] == rels[9]);
    CHECK(std::find(pool.begin(), pool.end(), rels[0]) == pool.end());
    CHECK(std::set<std::string>(pool.begin(), pool.end()).size() == pool.size());
  }

  TEST_CASE("pools on synthetic data never contain the gold item") {
    SyntheticSpec spec;
    spec.collision_rate = 0.3;
    spec.twin_outdegree_gap = true;
    const SyntheticData data = generate_synthetic(spec);
    const KnowledgeBase kb = data.build_kb();
    const AliasIndex index = build_index(kb);
    const TrainingSets sets = generate_training_sets(data.train, kb, index, 42);
    REQUIRE(sets.pools.subject_pool.size() == data.train.size());
    for (std::size_t i = 0; i < data.train.size(); ++i) {
      const QuestionInstance &q = data.train[i];
      const std::string label = kb.primary_alias(q.gold.subject);
      for (const EntityId &s : sets.pools.subject_pool[i]) {
        CHECK(s != q.gold.subject);
        CHECK(kb.primary_alias(s) != label);
      }
      const auto &pp = sets.pools.predicate_pool[i];
      CHECK(std::find(pp.begin(), pp.end(), q.gold.relation) == pp.end());
      CHECK_FALSE(sets.pools.subject_pool[i].empty());
    }
    CHECK(sets.label_failures == 0);
    CHECK(sets.entity_labels.size() == data.train.size());
    for (const LabeledQuestion &lq : sets.entity_labels) {
      CHECK(std::count(lq.tags.begin(), lq.tags.end(), Tag::kEntity) >= 1);
    }
    // Same seed, same sets.
    const TrainingSets again = generate_training_sets(data.train, kb, index, 42);
    CHECK(serialize_pools(again.pools) == serialize_pools(sets.pools));
    CHECK(serialize_match_pairs(again.type_pairs, "type") ==
          serialize_match_pairs(sets.type_pairs, "type"));
  }

  TEST_CASE("training set files round trip") {
    SyntheticSpec spec;
    const SyntheticData data = generate_synthetic(spec);
    const KnowledgeBase kb = data.build_kb();
    const AliasIndex index = build_index(kb);
    const TrainingSets sets = generate_training_sets(data.train, kb, index, 7);

    const std::string labels = serialize_entity_labels(sets.entity_labels);
    std::istringstream li(labels);
    CHECK(serialize_entity_labels(parse_entity_labels(li)) == labels);

    const std::string pairs = serialize_match_pairs(sets.relation_pairs, "relation");
    std::istringstream pi(pairs);
    const auto parsed = parse_match_pairs(pi);
    CHECK(parsed.size() == sets.relation_pairs.size());
    CHECK(serialize_match_pairs(parsed, "relation") == pairs);

    const std::string pools = serialize_pools(sets.pools);
    std::istringstream po(pools);
    CHECK(serialize_pools(parse_pools(po)) == pools);

    std::istringstream bad("question\ttags\nwhere obama\te\n");
    CHECK_THROWS_AS(parse_entity_labels(bad), ParseError);
  }
}

}  // namespace
}  // namespace kbqa
