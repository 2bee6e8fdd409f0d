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

#include "kbqa/e2e.h"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <set>
#include <stdexcept>

#include "json.hpp"
#include "kbqa/errors.h"
#include "kbqa/logging.h"
#include "kbqa/nn/autograd.h"
#include "kbqa/nn/losses.h"
#include "kbqa/nn/optim.h"
#include "kbqa/nn/snapshot.h"
#include "kbqa/rng.h"
#include "train_util.h"

namespace kbqa {

using nlohmann::json;
using nn::Var;

namespace {

constexpr double kTieTolerance = 1e-9;

struct NamedVariant {
  const char *name;
  HeadMode head;
  bool char_level, self_attention, type_in_label, type_as_task;
};

constexpr NamedVariant kVariants[] = {
    {"qa-s", HeadMode::kQas, false, false, false, false},
    {"qa-t", HeadMode::kQat, false, false, false, false},
    {"qa-t-w", HeadMode::kQat, true, false, false, false},
    {"qa-t-ws", HeadMode::kQat, true, true, false, false},
    {"qa-t-wt", HeadMode::kQat, true, false, true, false},
    {"qa-t-swt", HeadMode::kQat, true, true, true, false},
    {"qa-t-mwt", HeadMode::kQatType, true, false, false, true},
    {"qa-t-mwst", HeadMode::kQatType, true, true, false, true},
};

std::size_t HeadSize(HeadMode h) { return h == HeadMode::kQatType ? 3 : 2; }

std::vector<double> Values(const Var &v) {
  auto d = v->value.data();
  return {d.begin(), d.end()};
}

}  // namespace

E2EVariant parse_variant(const std::string &name) {
  for (const NamedVariant &n : kVariants) {
    if (name == n.name) {
      E2EVariant v;
      v.head = n.head;
      v.char_level = n.char_level;
      v.self_attention = n.self_attention;
      v.type_in_label = n.type_in_label;
      v.type_as_task = n.type_as_task;
      return v;
    }
  }
  throw std::invalid_argument("unknown variant '" + name + "'");
}

std::string variant_name(const E2EVariant &v) {
  for (const NamedVariant &n : kVariants) {
    if (v.head == n.head && v.char_level == n.char_level &&
        v.self_attention == n.self_attention && v.type_in_label == n.type_in_label &&
        v.type_as_task == n.type_as_task) {
      return n.name;
    }
  }
  // Flag combinations without a table name.
  std::string s = v.head == HeadMode::kQas ? "qa-s" : "qa-t";
  s += '+';
  if (v.type_as_task) s += 'm';
  if (v.char_level) s += 'w';
  if (v.self_attention) s += 's';
  if (v.type_in_label) s += 't';
  return s;
}

Tokens subject_text(const KnowledgeBase &kb, const EntityId &id, bool type_in_label) {
  std::string text = kb.primary_alias(id);
  if (type_in_label) {
    if (auto t = kb.notable_type(id)) text = *t + " " + text;
  }
  return tokenize(text);
}

E2EModel E2EModel::create(nn::Vocab words, nn::Vocab chars, const E2EVariant &variant,
                          const E2EConfig &cfg) {
  if (variant.type_in_label && variant.type_as_task) {
    throw std::invalid_argument("type_in_label and type_as_task are exclusive");
  }
  E2EModel m;
  m.variant_ = variant;
  if (variant.type_as_task) m.variant_.head = HeadMode::kQatType;
  m.cfg_ = cfg;
  m.store_ = std::make_shared<nn::ParamStore>();
  Rng rng(cfg.seed);
  m.words_ = nn::make_embedding(*m.store_, "word", std::move(words), cfg.word_dim, rng);
  std::size_t in = cfg.word_dim;
  if (variant.char_level) {
    m.chars_ = nn::make_embedding(*m.store_, "char", std::move(chars), cfg.char_dim, rng);
    m.char_gru_ = nn::make_recurrent(*m.store_, "char_gru", nn::CellKind::kGru, cfg.char_dim,
                                     cfg.char_hidden, rng);
    in += cfg.char_hidden;
  } else {
    m.chars_.vocab = std::move(chars);
  }
  m.lstm_ = nn::make_recurrent(*m.store_, "lstm", nn::CellKind::kLstm, in, cfg.hidden, rng);
  m.dense_ = nn::make_dense(*m.store_, "dense", cfg.t_max * cfg.hidden, cfg.hidden,
                            nn::Activation::kRelu, rng);
  m.head_ = m.store_->add("head", nn::Tensor({HeadSize(m.variant_.head)}, 1.0));
  return m;
}

Var E2EModel::encode_word(const std::string &word) const {
  Var v = words_.lookup(word);
  if (!variant_.char_level) return v;
  std::vector<std::string> chars;
  for (char c : word) chars.emplace_back(1, c);
  const Var vc = nn::recurrent_forward(char_gru_, chars_.embed_rows(chars)).last;
  const Var parts[] = {v, vc};
  return nn::concat(parts);
}

Var E2EModel::encode_flat(std::span<const std::string> tokens) const {
  if (tokens.empty()) throw EmptySequence();
  std::vector<Var> rows;
  rows.reserve(tokens.size());
  for (const std::string &w : tokens) rows.push_back(encode_word(w));
  Var states = nn::recurrent_forward(lstm_, rows).states;
  if (variant_.self_attention) states = nn::self_attention(states);
  return nn::flatten_padded(states, cfg_.t_max);
}

Var E2EModel::encode_sequence(std::span<const std::string> tokens, bool train, Rng &rng) const {
  return nn::dropout(dense_.forward(encode_flat(tokens)), cfg_.dropout, train, rng);
}

double E2EModel::combine(double s_qs, double s_qp, std::optional<double> s_qt) const {
  const nn::Tensor &w = head_->value;
  double s = w[0] * s_qs + w[1] * s_qp;
  if (variant_.head == HeadMode::kQatType) s += w[2] * s_qt.value_or(0.0);
  return s;
}

Var E2EModel::combine(const Var &s_qs, const Var &s_qp) const {
  return nn::add(nn::mul(nn::slice(head_, 0, 1), s_qs), nn::mul(nn::slice(head_, 1, 1), s_qp));
}

FactScore E2EModel::score_fact(std::span<const double> q_vec, const Fact &fact,
                               const KnowledgeBase &kb) const {
  Rng unused(0);
  FactScore f;
  f.fact = fact;
  const Var s = encode_sequence(subject_text(kb, fact.subject, variant_.type_in_label), false,
                                unused);
  const Var p = encode_sequence(relation_tokens(fact.relation), false, unused);
  f.s_qs = nn::cosine(q_vec, s->value.data());
  f.s_qp = nn::cosine(q_vec, p->value.data());
  if (variant_.type_as_task) {
    const auto t = kb.notable_type(fact.subject);
    f.s_qt = t ? nn::cosine(q_vec, encode_sequence(tokenize(*t), false, unused)->value.data())
               : 0.0;
  }
  f.combined = combine(f.s_qs, f.s_qp, f.s_qt);
  return f;
}

std::vector<FactScore> E2EModel::score_facts(std::span<const std::string> question,
                                             std::span<const Fact> facts,
                                             const KnowledgeBase &kb) const {
  Rng unused(0);
  const std::vector<double> q = Values(encode_sequence(question, false, unused));
  std::map<Tokens, std::vector<double>> cache;
  auto enc = [&](const Tokens &tokens) -> const std::vector<double> & {
    auto it = cache.find(tokens);
    if (it == cache.end()) {
      it = cache.emplace(tokens, Values(encode_sequence(tokens, false, unused))).first;
    }
    return it->second;
  };
  std::vector<FactScore> out;
  out.reserve(facts.size());
  for (const Fact &fact : facts) {
    FactScore f;
    f.fact = fact;
    f.s_qs = nn::cosine(q, enc(subject_text(kb, fact.subject, variant_.type_in_label)));
    f.s_qp = nn::cosine(q, enc(relation_tokens(fact.relation)));
    if (variant_.type_as_task) {
      const auto t = kb.notable_type(fact.subject);
      f.s_qt = t ? nn::cosine(q, enc(tokenize(*t))) : 0.0;
    }
    f.combined = combine(f.s_qs, f.s_qp, f.s_qt);
    out.push_back(std::move(f));
  }
  return out;
}

E2EModel train_e2e(std::span<const QuestionInstance> questions, const NegativePools &pools,
                   const KnowledgeBase &kb, const E2EVariant &variant, const E2EConfig &cfg,
                   E2EStats *stats) {
  if (questions.empty()) throw EmptyTrainingSet();
  if (pools.subject_pool.size() != questions.size() ||
      pools.predicate_pool.size() != questions.size()) {
    throw DataError("negative pools do not match the question list (" +
                    std::to_string(pools.subject_pool.size()) + " vs " +
                    std::to_string(questions.size()) + ")");
  }
  std::set<std::string> words;
  auto add_words = [&](const Tokens &t) { words.insert(t.begin(), t.end()); };
  for (const QuestionInstance &q : questions) add_words(q.tokens);
  for (const auto &[id, rec] : kb.entities()) {
    for (const std::string &a : rec.aliases) add_words(tokenize(a));
    if (rec.notable_type) add_words(tokenize(*rec.notable_type));
  }
  for (const std::string &r : kb.all_relations()) add_words(relation_tokens(r));
  std::set<std::string> chars;
  for (const std::string &w : words) {
    for (char c : w) chars.emplace(1, c);
  }
  E2EModel model = E2EModel::create(internal::make_vocab(words), internal::make_vocab(chars),
                                    variant, cfg);
  internal::load_vectors_if_any(TrainConfig{.embed_dim = cfg.word_dim,
                                            .word_vectors = cfg.word_vectors},
                                model.word_table());
  const E2EVariant &v = model.variant();

  nn::AdamConfig adam;
  adam.lr = cfg.lr;
  adam.clip_norm = cfg.clip_norm;
  const nn::ParamStore &store = model.params();
  nn::AdamState state = nn::make_adam_state(store.vars(), adam);
  Rng rng(cfg.seed);
  Rng dropout_rng(cfg.seed + 1);

  E2EStats local;
  // One epoch walks every question's predicate pool without replacement;
  // each p- is paired with a freshly drawn s-. Questions with an empty
  // predicate pool still get one step for the subject channel.
  std::vector<std::pair<std::size_t, std::size_t>> steps;  // (question, p- index)
  for (std::size_t i = 0; i < questions.size(); ++i) {
    const std::size_t np = pools.predicate_pool[i].size();
    if (np == 0) {
      steps.emplace_back(i, SIZE_MAX);
      ++local.skipped_channels;
    }
    for (std::size_t k = 0; k < np; ++k) steps.emplace_back(i, k);
  }

  std::size_t type_steps = 0;
  const Var &head = model.head_weights();
  for (std::size_t epoch = 0; epoch < cfg.epochs; ++epoch) {
    rng.shuffle(steps);
    double total = 0.0;
    for (const auto &[i, pk] : steps) {
      const QuestionInstance &q = questions[i];
      const auto &spool = pools.subject_pool[i];
      std::optional<EntityId> s_neg;
      if (!spool.empty()) s_neg = spool[rng.index(spool.size())];
      std::optional<std::string> p_neg;
      if (pk != SIZE_MAX) p_neg = pools.predicate_pool[i][pk];
      if (!s_neg) ++local.skipped_channels;
      if (!s_neg && !p_neg) continue;

      auto enc = [&](const Tokens &t) { return model.encode_sequence(t, true, dropout_rng); };
      const Var qv = enc(q.tokens);
      const Var cs_pos = nn::cosine(qv, enc(subject_text(kb, q.gold.subject, v.type_in_label)));
      const Var cp_pos = nn::cosine(qv, enc(relation_tokens(q.gold.relation)));
      const Var cs_neg =
          s_neg ? nn::cosine(qv, enc(subject_text(kb, *s_neg, v.type_in_label))) : cs_pos;
      const Var cp_neg = p_neg ? nn::cosine(qv, enc(relation_tokens(*p_neg))) : cp_pos;

      Var loss;
      if (v.head == HeadMode::kQas) {
        loss = nn::hinge(model.combine(cs_pos, cp_pos), model.combine(cs_neg, cp_neg), cfg.gamma);
      } else {
        const Var wa = nn::slice(head, 0, 1), wb = nn::slice(head, 1, 1);
        std::vector<Var> terms;
        if (s_neg) terms.push_back(nn::hinge(nn::mul(wa, cs_pos), nn::mul(wa, cs_neg), cfg.gamma));
        if (p_neg) terms.push_back(nn::hinge(nn::mul(wb, cp_pos), nn::mul(wb, cp_neg), cfg.gamma));
        if (v.head == HeadMode::kQatType) {
          const auto t_pos = kb.notable_type(q.gold.subject);
          const auto t_neg = s_neg ? kb.notable_type(*s_neg) : std::nullopt;
          if (t_pos && t_neg && *t_pos != *t_neg) {
            const Var wc = nn::slice(head, 2, 1);
            terms.push_back(nn::hinge(nn::mul(wc, nn::cosine(qv, enc(tokenize(*t_pos)))),
                                      nn::mul(wc, nn::cosine(qv, enc(tokenize(*t_neg)))),
                                      cfg.gamma));
            ++type_steps;
          } else {
            ++local.skipped_channels;
          }
        }
        loss = terms.front();
        for (std::size_t k = 1; k < terms.size(); ++k) loss = nn::add(loss, terms[k]);
      }
      total += nn::item(loss);
      nn::backward(loss);
      if (v.head == HeadMode::kQatType && head->grad.size() == 3) {
        local.type_grad_norm += std::abs(head->grad[2]);
      }
      nn::adam_step(store.vars(), state);
      store.zero_grad();
    }
    local.epoch_loss.push_back(total / static_cast<double>(steps.size()));
    KBQA_LOG(Info) << variant_name(v) << " epoch " << epoch + 1 << " loss "
                   << local.epoch_loss.back() << " head " << head->value[0] << " "
                   << head->value[1];
  }
  if (type_steps > 0) local.type_grad_norm /= static_cast<double>(type_steps);
  if (local.skipped_channels > 0) {
    KBQA_LOG(Info) << local.skipped_channels << " loss channel(s) skipped for empty pools";
  }
  if (stats) *stats = std::move(local);
  return model;
}

std::vector<FactScore> answer(const FactScorer &scorer, const KnowledgeBase &kb,
                              const AliasIndex &index, std::span<const std::string> question,
                              bool out_degree_sort, std::size_t k) {
  const auto candidates = index.retrieve_for_question(question);
  std::vector<Fact> facts;
  for (const CandidateEntity &c : candidates) {
    for (std::size_t i : kb.facts_of(c.id)) facts.push_back(kb.facts()[i]);
  }
  if (facts.empty()) throw NoCandidates();
  std::vector<FactScore> scores = scorer.score_facts(question, facts, kb);
  std::stable_sort(scores.begin(), scores.end(),
                   [](const FactScore &a, const FactScore &b) { return a.combined > b.combined; });
  if (out_degree_sort) {
    const double top = scores.front().combined;
    auto end = std::find_if(scores.begin(), scores.end(), [&](const FactScore &f) {
      return std::abs(f.combined - top) > kTieTolerance;
    });
    std::stable_sort(scores.begin(), end, [&](const FactScore &a, const FactScore &b) {
      return kb.out_degree(a.fact.subject) > kb.out_degree(b.fact.subject);
    });
  }
  if (scores.size() > k) scores.resize(k);
  return scores;
}

void save_e2e(const std::string &path, const E2EModel &model) {
  const E2EVariant &v = model.variant();
  const E2EConfig &c = model.config();
  json meta = {
      {"kind", "e2e"},
      {"variant", {{"head", static_cast<int>(v.head)},
                   {"char_level", v.char_level},
                   {"self_attention", v.self_attention},
                   {"type_in_label", v.type_in_label},
                   {"type_as_task", v.type_as_task}}},
      {"config", {{"word_dim", c.word_dim}, {"char_dim", c.char_dim},
                  {"char_hidden", c.char_hidden}, {"hidden", c.hidden}, {"t_max", c.t_max},
                  {"epochs", c.epochs}, {"lr", c.lr}, {"gamma", c.gamma},
                  {"dropout", c.dropout}, {"clip_norm", c.clip_norm}, {"seed", c.seed}}},
      {"words", internal::vocab_json(model.word_vocab())},
      {"chars", internal::vocab_json(model.char_vocab())},
  };
  nn::save_model_snapshot(path, meta.dump(), model.params());
}

E2EModel load_e2e(const std::string &path) {
  const nn::ModelSnapshot snap = nn::load_model_snapshot(path);
  try {
    const json meta = json::parse(snap.metadata);
    if (meta.at("kind") != "e2e") throw SnapshotError(path + ": not an end-to-end bundle");
    const json &jv = meta.at("variant");
    E2EVariant v;
    v.head = static_cast<HeadMode>(jv.at("head").get<int>());
    v.char_level = jv.at("char_level").get<bool>();
    v.self_attention = jv.at("self_attention").get<bool>();
    v.type_in_label = jv.at("type_in_label").get<bool>();
    v.type_as_task = jv.at("type_as_task").get<bool>();
    const json &jc = meta.at("config");
    E2EConfig c;
    c.word_dim = jc.at("word_dim").get<std::size_t>();
    c.char_dim = jc.at("char_dim").get<std::size_t>();
    c.char_hidden = jc.at("char_hidden").get<std::size_t>();
    c.hidden = jc.at("hidden").get<std::size_t>();
    c.t_max = jc.at("t_max").get<std::size_t>();
    c.epochs = jc.at("epochs").get<std::size_t>();
    c.lr = jc.at("lr").get<double>();
    c.gamma = jc.at("gamma").get<double>();
    c.dropout = jc.at("dropout").get<double>();
    c.clip_norm = jc.at("clip_norm").get<double>();
    c.seed = jc.at("seed").get<std::uint64_t>();
    E2EModel m = E2EModel::create(internal::vocab_from_json(meta.at("words")),
                                  internal::vocab_from_json(meta.at("chars")), v, c);
    nn::restore_params(snap, m.params());
    return m;
  } catch (const json::exception &e) {
    throw SnapshotError(path + ": bad metadata: " + e.what());
  }
}

}  // namespace kbqa
