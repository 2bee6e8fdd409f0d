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
#include <cmath>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "doctest.h"
#include "kbqa/alias_index.h"
#include "kbqa/datagen.h"
#include "kbqa/e2e.h"
#include "kbqa/errors.h"
#include "kbqa/nn/autograd.h"
#include "kbqa/rng.h"
#include "kbqa/synthetic.h"
#include "test_util.h"

namespace kbqa {
namespace {

using nn::Var;

EntityId Id(const std::string &s) { return EntityId::parse(s); }

nn::Vocab Words(std::initializer_list<const char *> ws) {
  nn::Vocab v;
  for (const char *w : ws) v.add(w);
  return v;
}

nn::Vocab Chars(const std::string &letters) {
  nn::Vocab v;
  for (char c : letters) v.add(std::string(1, c));
  return v;
}

std::vector<double> Values(const Var &v) {
  return {v->value.data().begin(), v->value.data().end()};
}

double Sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

// Scores the gold fact of each question 1 and everything else 0.
class OracleScorer : public FactScorer {
 public:
  explicit OracleScorer(std::span<const QuestionInstance> qs) {
    for (const auto &q : qs) gold_[join(q.tokens)] = q.gold;
  }
  std::vector<FactScore> score_facts(std::span<const std::string> question,
                                     std::span<const Fact> facts,
                                     const KnowledgeBase &) const override {
    const Fact &g = gold_.at(join(question));
    std::vector<FactScore> out;
    for (const Fact &f : facts) {
      const double s = f.subject == g.subject && f.relation == g.relation ? 1.0 : 0.0;
      out.push_back({f, s, s, std::nullopt, s});
    }
    return out;
  }

 private:
  std::map<std::string, Fact> gold_;
};

// Fixed score per subject, ignoring the question.
class SubjectScorer : public FactScorer {
 public:
  explicit SubjectScorer(std::map<EntityId, double> s) : s_(std::move(s)) {}
  std::vector<FactScore> score_facts(std::span<const std::string>, std::span<const Fact> facts,
                                     const KnowledgeBase &) const override {
    std::vector<FactScore> out;
    for (const Fact &f : facts) {
      const double v = s_.count(f.subject) ? s_.at(f.subject) : 0.0;
      out.push_back({f, v, 0.0, std::nullopt, v});
    }
    return out;
  }

 private:
  std::map<EntityId, double> s_;
};

struct Toy {
  SyntheticData data;
  KnowledgeBase kb;
  AliasIndex index;
  TrainingSets sets;
};

Toy MakeToy(std::size_t n_entities, std::uint64_t seed = 1) {
  SyntheticSpec spec;
  spec.seed = seed;
  spec.n_entities = n_entities;
  Toy t{generate_synthetic(spec), {}, {}, {}};
  t.kb = t.data.build_kb();
  t.index = build_index(t.kb);
  t.sets = generate_training_sets(t.data.train, t.kb, t.index, 42);
  return t;
}

TEST_SUITE("e2e") {
  TEST_CASE("variant names") {
    for (const char *name : {"qa-s", "qa-t", "qa-t-w", "qa-t-ws", "qa-t-wt", "qa-t-swt",
                             "qa-t-mwt", "qa-t-mwst"}) {
      CHECK(variant_name(parse_variant(name)) == name);
    }
    const E2EVariant v = parse_variant("qa-t-mwst");
    CHECK(v.type_as_task);
    CHECK(v.self_attention);
    CHECK(v.head == HeadMode::kQatType);
    CHECK_FALSE(v.type_in_label);
    CHECK(parse_variant("qa-t-swt").type_in_label);
    CHECK(parse_variant("qa-s").head == HeadMode::kQas);
    CHECK_THROWS_AS(parse_variant("qa-x"), std::invalid_argument);
    E2EVariant both;
    both.type_in_label = both.type_as_task = true;
    CHECK_THROWS_AS(E2EModel::create(Words({"a"}), Chars("a"), both, {}), std::invalid_argument);
  }

  TEST_CASE("word encoder") {
    E2EConfig cfg;
    const E2EModel word_only =
        E2EModel::create(Words({"obama", "born"}), Chars("abc"), parse_variant("qa-t"), cfg);
    const Var row = word_only.encode_word("obama");
    CHECK(row->size() == cfg.word_dim);
    const auto &table = word_only.params().get("word")->value;
    const std::size_t k = word_only.word_vocab().index("obama");
    for (std::size_t j = 0; j < cfg.word_dim; ++j) CHECK(row->value[j] == table.at(k, j));

    const E2EModel chars =
        E2EModel::create(Words({"obama"}), Chars("abc"), parse_variant("qa-t-w"), cfg);
    CHECK(chars.encode_word("obama")->size() == cfg.word_dim + cfg.char_hidden);

    // One character: the char part is a single GRU step from zero.
    const Var v = chars.encode_word("b");
    const auto &ctab = chars.params().get("char")->value;
    const std::size_t ci = chars.char_vocab().index("b");
    const auto &P = chars.params();
    for (std::size_t i = 0; i < cfg.char_hidden; ++i) {
      double pz = P.get("char_gru.b_z")->value[i], pn = P.get("char_gru.b_n")->value[i];
      for (std::size_t j = 0; j < cfg.char_dim; ++j) {
        pz += P.get("char_gru.W_z")->value.at(i, j) * ctab.at(ci, j);
        pn += P.get("char_gru.W_n")->value.at(i, j) * ctab.at(ci, j);
      }
      const double h = Sigmoid(pz) * std::tanh(pn);
      CHECK(v->value[cfg.word_dim + i] == doctest::Approx(h).epsilon(1e-12));
    }

    // Unknown words share the OOV row but not the character state.
    const Var x = chars.encode_word("abca"), y = chars.encode_word("abcb");
    bool word_same = true, char_same = true;
    for (std::size_t j = 0; j < cfg.word_dim; ++j) word_same &= x->value[j] == y->value[j];
    for (std::size_t j = cfg.word_dim; j < x->size(); ++j) char_same &= x->value[j] == y->value[j];
    CHECK(word_same);
    CHECK_FALSE(char_same);
  }

  TEST_CASE("sequence encoder shapes, padding and dropout") {
    E2EConfig cfg;
    cfg.t_max = 8;
    cfg.dropout = 0.0;
    const E2EModel m = E2EModel::create(Words({"a", "b", "c"}), Chars("abc"), parse_variant("qa-t"), cfg);
    const Tokens three = {"a", "b", "c"};
    const Var flat = m.encode_flat(three);
    CHECK(flat->size() == cfg.t_max * cfg.hidden);
    for (std::size_t i = 3 * cfg.hidden; i < flat->size(); ++i) CHECK(flat->value[i] == 0.0);
    bool any = false;
    for (std::size_t i = 0; i < 3 * cfg.hidden; ++i) any |= flat->value[i] != 0.0;
    CHECK(any);
    Rng rng(1);
    CHECK(Values(m.encode_sequence(three, true, rng)) == Values(m.encode_sequence(three, false, rng)));
    CHECK(m.encode_sequence(three, false, rng)->size() == cfg.hidden);
    CHECK_THROWS_AS(m.encode_flat(Tokens{}), EmptySequence);
    const Tokens long_q(30, "a");
    CHECK(m.encode_flat(long_q)->size() == cfg.t_max * cfg.hidden);
  }

  TEST_CASE("self-attention is live and a no-op on one token") {
    E2EConfig cfg;
    const nn::Vocab w = Words({"where", "was", "obama", "born"});
    const E2EModel off = E2EModel::create(w, Chars("a"), parse_variant("qa-t-w"), cfg);
    const E2EModel on = E2EModel::create(w, Chars("a"), parse_variant("qa-t-ws"), cfg);
    const Tokens one = {"obama"};
    CHECK(Values(off.encode_flat(one)) == Values(on.encode_flat(one)));
    const Tokens many = {"where", "was", "obama", "born"};
    CHECK(Values(off.encode_flat(many)) != Values(on.encode_flat(many)));
  }

  TEST_CASE("type in label") {
    const KnowledgeBase kb = build_kb({make_fact("m.017hzy7", "/music/recording/artist", "m.x")},
                                      {{Id("m.017hzy7"), "Germany"}},
                                      {{Id("m.017hzy7"), "musical recording"}});
    CHECK(join(subject_text(kb, Id("m.017hzy7"), true)) == "musical recording germany");
    CHECK(join(subject_text(kb, Id("m.017hzy7"), false)) == "germany");
    CHECK(join(subject_text(kb, Id("m.x"), true)) == "m.x");
  }

  TEST_CASE("scoring heads") {
    const KnowledgeBase kb = build_kb({make_fact("m.a", "/people/person/place_of_birth", "m.x")},
                                      {{Id("m.a"), "obama"}}, {});
    E2EConfig cfg;
    const E2EModel m = E2EModel::create(Words({"obama", "people", "person", "place_of_birth"}),
                                        Chars("a"), parse_variant("qa-t"), cfg);
    CHECK(m.combine(0.3, 0.4, std::nullopt) == doctest::Approx(0.7));
    Rng rng(1);
    const Tokens subject = {"obama"};
    const Var q = m.encode_sequence(subject, false, rng);
    const FactScore fs = m.score_fact(q->value.data(), kb.facts()[0], kb);
    CHECK(fs.s_qs == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(fs.combined == doctest::Approx(fs.s_qs + fs.s_qp));
    CHECK(fs.s_qp >= -1.0);
    CHECK(fs.s_qp <= 1.0);
    CHECK_FALSE(fs.s_qt.has_value());

    const E2EModel t = E2EModel::create(Words({"obama"}), Chars("a"), parse_variant("qa-t-mwt"), cfg);
    CHECK(t.head_weights()->size() == 3);
    for (double w : t.head_weights()->value.data()) CHECK(w > 0.0);
  }

  TEST_CASE("equal weights make the two heads rank alike") {
    const Toy toy = MakeToy(20);
    E2EConfig cfg;
    nn::Vocab words;
    for (const auto &q : toy.data.train) for (const auto &w : q.tokens) words.add(w);
    for (const auto &[id, rec] : toy.kb.entities()) {
      for (const auto &w : subject_text(toy.kb, id, false)) words.add(w);
    }
    for (const auto &r : toy.kb.all_relations()) for (const auto &w : relation_tokens(r)) words.add(w);
    const E2EModel qas = E2EModel::create(words, Chars("a"), parse_variant("qa-s"), cfg);
    const E2EModel qat = E2EModel::create(words, Chars("a"), parse_variant("qa-t"), cfg);
    for (const E2EModel *m : {&qas, &qat}) m->head_weights()->value.fill(0.7);
    for (const auto &q : toy.data.test) {
      const auto a = answer(qas, toy.kb, toy.index, q.tokens, false, 100);
      const auto b = answer(qat, toy.kb, toy.index, q.tokens, false, 100);
      REQUIRE(a.size() == b.size());
      for (std::size_t i = 0; i < a.size(); ++i) {
        CHECK(a[i].fact == b[i].fact);
        CHECK(a[i].combined == b[i].combined);
      }
    }
  }

  TEST_CASE("one encoder serves questions, subjects and predicates") {
    E2EConfig cfg;
    const E2EModel m = E2EModel::create(Words({"where", "obama", "people", "place_of_birth"}),
                                        Chars("a"), parse_variant("qa-t"), cfg);
    std::size_t lstm_sets = 0;
    for (const auto &n : m.params().names()) lstm_sets += n == "lstm.W_i";
    CHECK(lstm_sets == 1);
    const Tokens q = {"where", "obama"}, s = {"obama"}, p = {"people", "place_of_birth"};
    const auto q0 = Values(m.encode_flat(q)), s0 = Values(m.encode_flat(s)),
               p0 = Values(m.encode_flat(p));
    // A gradient taken through the subject role moves all three roles.
    m.params().zero_grad();
    nn::backward(nn::sum(m.encode_flat(s)));
    const Var &w = m.params().get("lstm.W_i");
    REQUIRE(w->grad.size() == w->value.size());
    for (std::size_t i = 0; i < w->size(); ++i) w->value[i] -= 0.5 * w->grad[i];
    CHECK(Values(m.encode_flat(q)) != q0);
    CHECK(Values(m.encode_flat(s)) != s0);
    CHECK(Values(m.encode_flat(p)) != p0);
  }

  TEST_CASE("answer examples") {
    const KnowledgeBase kb = build_kb(
        {make_fact("m.a", "/r/r/x", "m.1"), make_fact("m.b", "/r/r/x", "m.2"),
         make_fact("m.b", "/r/r/y", "m.3"), make_fact("m.b", "/r/r/z", "m.4"),
         make_fact("m.b", "/r/r/w", "m.5"), make_fact("m.b", "/r/r/v", "m.6"),
         make_fact("m.b", "/r/r/u", "m.7"), make_fact("m.b", "/r/r/t", "m.8"),
         make_fact("m.c", "/r/r/x", "m.9")},
        {{Id("m.a"), "obama"}, {Id("m.b"), "obama"}, {Id("m.c"), "hawaii"}}, {});
    const AliasIndex index = build_index(kb);
    const Tokens hawaii = tokenize("what about hawaii");
    const SubjectScorer flat({});
    const auto one = answer(flat, kb, index, hawaii, false, 5);
    REQUIRE(one.size() == 1);
    CHECK(one[0].fact.object == Id("m.9"));

    // m.a (1 fact) and m.b (7 facts) tie at the top.
    const SubjectScorer tie({{Id("m.a"), 0.8}, {Id("m.b"), 0.8}});
    const Tokens obama = tokenize("where was obama born");
    const auto plain = answer(tie, kb, index, obama, false, 100);
    CHECK(plain.front().fact.subject == Id("m.a"));
    const auto sorted = answer(tie, kb, index, obama, true, 100);
    CHECK(sorted.front().fact.subject == Id("m.b"));
    CHECK(sorted.size() == 8);
    CHECK(answer(tie, kb, index, obama, true, 3).size() == 3);
    CHECK_THROWS_AS(answer(tie, kb, index, tokenize("zzz"), false, 1), NoCandidates);

    // A unique top score is never moved.
    const SubjectScorer unique({{Id("m.a"), 0.9}, {Id("m.b"), 0.8}});
    CHECK(answer(unique, kb, index, obama, true, 1)[0].fact.subject == Id("m.a"));
  }

  TEST_CASE("out-degree sort only permutes ties") {
    Rng rng(4);
    const Toy toy = MakeToy(30);
    for (int trial = 0; trial < 50; ++trial) {
      std::map<EntityId, double> s;
      for (const auto &[id, rec] : toy.kb.entities()) s[id] = static_cast<double>(rng.index(3)) / 2.0;
      const SubjectScorer scorer(s);
      for (const auto &q : toy.data.test) {
        const auto a = answer(scorer, toy.kb, toy.index, q.tokens, false, 1000);
        const auto b = answer(scorer, toy.kb, toy.index, q.tokens, true, 1000);
        REQUIRE(a.size() == b.size());
        const double top = a.front().combined;
        std::multiset<std::string> ta, tb;
        for (std::size_t i = 0; i < a.size(); ++i) {
          if (std::abs(a[i].combined - top) <= 1e-9) {
            ta.insert(a[i].fact.subject.str() + a[i].fact.relation);
            tb.insert(b[i].fact.subject.str() + b[i].fact.relation);
          } else {
            CHECK(a[i].fact == b[i].fact);
          }
        }
        CHECK(ta == tb);
      }
    }
  }

  TEST_CASE("an oracle scorer ranks gold first") {
    const Toy toy = MakeToy(60, 2);
    std::vector<QuestionInstance> all = toy.data.train;
    all.insert(all.end(), toy.data.test.begin(), toy.data.test.end());
    const OracleScorer oracle(all);
    for (const auto &q : all) {
      const auto r = answer(oracle, toy.kb, toy.index, q.tokens, false, 1);
      REQUIRE(r.size() == 1);
      CHECK(r[0].fact.subject == q.gold.subject);
      CHECK(r[0].fact.relation == q.gold.relation);
    }
  }

  TEST_CASE("training lowers the loss and keeps the type task live") {
    const Toy toy = MakeToy(20);
    E2EConfig cfg;
    cfg.seed = 7;
    cfg.epochs = 3;
    E2EStats stats;
    train_e2e(toy.data.train, toy.sets.pools, toy.kb, parse_variant("qa-t"), cfg, &stats);
    REQUIRE(stats.epoch_loss.size() == 3);
    CHECK(stats.epoch_loss[1] < stats.epoch_loss[0]);
    CHECK(stats.epoch_loss[2] < stats.epoch_loss[1]);

    cfg.epochs = 1;
    E2EStats typed;
    train_e2e(toy.data.train, toy.sets.pools, toy.kb, parse_variant("qa-t-mwt"), cfg, &typed);
    CHECK(typed.type_grad_norm > 0.0);

    // Seeded runs are identical.
    E2EStats again;
    train_e2e(toy.data.train, toy.sets.pools, toy.kb, parse_variant("qa-t-mwt"), cfg, &again);
    CHECK(again.epoch_loss == typed.epoch_loss);
    CHECK_THROWS_AS(train_e2e(std::span<const QuestionInstance>{}, toy.sets.pools, toy.kb,
                              parse_variant("qa-t"), cfg),
                    EmptyTrainingSet);
  }

  TEST_CASE("snapshot round trip") {
    const Toy toy = MakeToy(10);
    E2EConfig cfg;
    cfg.epochs = 1;
    const E2EModel m =
        train_e2e(toy.data.train, toy.sets.pools, toy.kb, parse_variant("qa-t-mwst"), cfg);
    testing::TempDir dir("e2e");
    save_e2e(dir.file("m.nnqa"), m);
    const E2EModel back = load_e2e(dir.file("m.nnqa"));
    CHECK(variant_name(back.variant()) == "qa-t-mwst");
    for (const auto &q : toy.data.test) {
      const auto a = answer(m, toy.kb, toy.index, q.tokens, true, 3);
      const auto b = answer(back, toy.kb, toy.index, q.tokens, true, 3);
      REQUIRE(a.size() == b.size());
      for (std::size_t i = 0; i < a.size(); ++i) CHECK(a[i].combined == b[i].combined);
    }
  }
}

}  // namespace
}  // namespace kbqa
