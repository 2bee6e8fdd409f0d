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

#include "kbqa/pipeline.h"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <set>
#include <stdexcept>

#include "kbqa/errors.h"
#include "kbqa/logging.h"
#include "kbqa/nn/autograd.h"
#include "kbqa/nn/losses.h"
#include "kbqa/nn/optim.h"
#include "kbqa/rng.h"
#include "train_util.h"

namespace kbqa {

using nlohmann::json;
using nn::Var;

namespace {

constexpr double kTieTolerance = 1e-9;

// Shuffled single-example passes with Adam; returns mean loss per epoch.
template <typename LossFn>
std::vector<double> RunEpochs(std::size_t n, const TrainConfig &cfg, const nn::ParamStore &store,
                              LossFn loss_of) {
  nn::AdamConfig adam;
  adam.lr = cfg.lr;
  adam.clip_norm = cfg.clip_norm;
  nn::AdamState state = nn::make_adam_state(store.vars(), adam);
  Rng order_rng(cfg.seed);
  Rng dropout_rng(cfg.seed + 1);
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::vector<double> curve;
  for (std::size_t epoch = 0; epoch < cfg.epochs; ++epoch) {
    order_rng.shuffle(order);
    double total = 0.0;
    for (std::size_t i : order) {
      Var loss = loss_of(i, dropout_rng);
      total += nn::item(loss);
      nn::backward(loss);
      nn::adam_step(store.vars(), state);
      store.zero_grad();
    }
    curve.push_back(total / static_cast<double>(n));
    KBQA_LOG(Info) << "epoch " << epoch + 1 << " loss " << curve.back();
  }
  return curve;
}

}  // namespace

// ---------------------------------------------------------------- tagger

TaggerModel TaggerModel::create(nn::Vocab vocab, const TrainConfig &cfg) {
  TaggerModel m;
  m.cfg_ = cfg;
  m.store_ = std::make_shared<nn::ParamStore>();
  Rng rng(cfg.seed);
  m.embed_ = nn::make_embedding(*m.store_, "embed", std::move(vocab), cfg.embed_dim, rng);
  m.fwd_ = nn::make_recurrent(*m.store_, "lstm_f", nn::CellKind::kLstm, cfg.embed_dim,
                              cfg.hidden, rng);
  m.bwd_ = nn::make_recurrent(*m.store_, "lstm_b", nn::CellKind::kLstm, cfg.embed_dim,
                              cfg.hidden, rng);
  m.head_ = nn::make_dense(*m.store_, "tag", 2 * cfg.hidden, 2, nn::Activation::kNone, rng);
  return m;
}

Var TaggerModel::probs(std::span<const std::string> tokens) const {
  if (tokens.empty()) throw EmptySequence();
  const auto rows = embed_.embed_rows(tokens);
  const nn::BiOutput enc = nn::bidirectional_encode(fwd_, bwd_, rows);
  std::vector<Var> logits;
  logits.reserve(tokens.size());
  for (std::size_t t = 0; t < tokens.size(); ++t) {
    logits.push_back(head_.forward(nn::row(enc.states, t)));
  }
  return nn::softmax(nn::stack_rows(logits, 2));
}

LabeledQuestion TaggerModel::tag(std::span<const std::string> tokens) const {
  LabeledQuestion out;
  out.tokens.assign(tokens.begin(), tokens.end());
  if (tokens.empty()) return out;
  const Var p = probs(tokens);
  for (std::size_t t = 0; t < tokens.size(); ++t) {
    out.tags.push_back(p->value.at(t, 0) > p->value.at(t, 1) ? Tag::kEntity : Tag::kContext);
  }
  return out;
}

TaggerModel train_tagger(std::span<const LabeledQuestion> data, const TrainConfig &cfg,
                         TrainStats *stats) {
  if (data.empty()) throw EmptyTrainingSet();
  std::set<std::string> words;
  for (const LabeledQuestion &l : data) words.insert(l.tokens.begin(), l.tokens.end());
  TaggerModel model = TaggerModel::create(internal::make_vocab(words), cfg);
  internal::load_vectors_if_any(cfg, model.embedding());

  std::vector<std::vector<int>> gold(data.size());
  for (std::size_t i = 0; i < data.size(); ++i) {
    for (Tag t : data[i].tags) gold[i].push_back(t == Tag::kEntity ? 0 : 1);
  }
  auto curve = RunEpochs(data.size(), cfg, model.params(), [&](std::size_t i, Rng &) {
    return nn::categorical_ce(model.probs(data[i].tokens), gold[i]);
  });
  if (stats) stats->epoch_loss = std::move(curve);
  return model;
}

LabeledQuestion tag_question(const EntityTagger &tagger, const QuestionInstance &q) {
  return tagger.tag(q.tokens);
}

// --------------------------------------------------------------- matcher

MatcherModel MatcherModel::create(nn::Vocab vocab, const TrainConfig &cfg) {
  MatcherModel m;
  m.cfg_ = cfg;
  m.store_ = std::make_shared<nn::ParamStore>();
  Rng rng(cfg.seed);
  m.embed_ = nn::make_embedding(*m.store_, "embed", std::move(vocab), cfg.embed_dim, rng);
  m.fwd_ = nn::make_recurrent(*m.store_, "gru_f", nn::CellKind::kGru, cfg.embed_dim,
                              cfg.hidden, rng);
  m.bwd_ = nn::make_recurrent(*m.store_, "gru_b", nn::CellKind::kGru, cfg.embed_dim,
                              cfg.hidden, rng);
  m.hidden_ = nn::make_dense(*m.store_, "hidden", 4 * cfg.hidden, cfg.hidden,
                             nn::Activation::kRelu, rng);
  m.out_ = nn::make_dense(*m.store_, "out", cfg.hidden, 1, nn::Activation::kSigmoid, rng);
  return m;
}

Var MatcherModel::encode(std::span<const std::string> tokens) const {
  if (tokens.empty()) throw EmptySequence();
  return nn::bidirectional_encode(fwd_, bwd_, embed_.embed_rows(tokens)).last;
}

Var MatcherModel::forward(std::span<const std::string> question,
                          std::span<const std::string> candidate, bool train, Rng &rng) const {
  const Var parts[] = {encode(question), encode(candidate)};
  Var h = hidden_.forward(nn::concat(parts));
  h = nn::dropout(h, cfg_.dropout, train, rng);
  return out_.forward(h);
}

double MatcherModel::score(std::span<const std::string> question,
                           const std::string &candidate) const {
  Rng unused(0);
  const Tokens cand = candidate_tokens(candidate);
  return nn::item(forward(question, cand, false, unused));
}

MatcherModel train_matcher(std::span<const MatchPair> pairs, const TrainConfig &cfg,
                           TrainStats *stats) {
  if (pairs.empty()) throw EmptyTrainingSet();
  std::vector<Tokens> cands;
  std::set<std::string> words;
  for (const MatchPair &p : pairs) {
    cands.push_back(candidate_tokens(p.candidate));
    words.insert(p.question.begin(), p.question.end());
    words.insert(cands.back().begin(), cands.back().end());
  }
  MatcherModel model = MatcherModel::create(internal::make_vocab(words), cfg);
  internal::load_vectors_if_any(cfg, model.embedding());
  auto curve = RunEpochs(pairs.size(), cfg, model.params(), [&](std::size_t i, Rng &rng) {
    return nn::binary_ce(model.forward(pairs[i].question, cands[i], true, rng), pairs[i].tag);
  });
  if (stats) stats->epoch_loss = std::move(curve);
  return model;
}

// ------------------------------------------------------------ prediction

std::string strategy_name(Strategy s) {
  switch (s) {
    case Strategy::kPqa: return "p-qa";
    case Strategy::kPqaOut: return "p-qa-out";
    case Strategy::kPqaType: return "p-qa-type";
    case Strategy::kPqaOutType: return "p-qa-out-type";
    case Strategy::kPqaTypeOut: return "p-qa-type-out";
  }
  return "?";
}

Strategy parse_strategy(const std::string &name) {
  for (Strategy s : {Strategy::kPqa, Strategy::kPqaOut, Strategy::kPqaType,
                     Strategy::kPqaOutType, Strategy::kPqaTypeOut}) {
    if (strategy_name(s) == name) return s;
  }
  throw std::invalid_argument("unknown strategy '" + name + "'");
}

bool strategy_uses_type(Strategy s) {
  return s == Strategy::kPqaType || s == Strategy::kPqaOutType || s == Strategy::kPqaTypeOut;
}

std::vector<CandidateEntity> collect_candidates(const AliasIndex &index,
                                                std::span<const std::string> tokens,
                                                std::span<const std::string> span_texts) {
  std::map<EntityId, CandidateEntity> best;
  for (const std::string &text : span_texts) {
    for (CandidateEntity &c : index.retrieve(text)) {
      auto it = best.find(c.id);
      if (it == best.end()) {
        best.emplace(c.id, std::move(c));
      } else if (candidate_before(c, it->second)) {
        it->second = std::move(c);
      }
    }
  }
  std::vector<CandidateEntity> out;
  for (auto &[id, c] : best) out.push_back(std::move(c));
  std::sort(out.begin(), out.end(), candidate_before);
  if (out.empty()) out = index.retrieve_for_question(tokens);
  return out;
}

Prediction predict(Strategy strategy, const QuestionInstance &q, const PipelineModels &models,
                   const KnowledgeBase &kb, const AliasIndex &index) {
  if (models.tagger == nullptr || models.relation == nullptr) {
    throw Error("pipeline needs a tagger and a relation matcher");
  }
  if (strategy_uses_type(strategy) && models.type == nullptr) {
    throw Error(strategy_name(strategy) + " needs a type matcher");
  }
  Prediction p;
  p.strategy = strategy_name(strategy);
  p.spans = spans(models.tagger->tag(q.tokens));
  p.candidates = collect_candidates(index, q.tokens, p.spans);
  if (p.candidates.empty()) throw NoCandidates();

  std::set<std::string> rel_set;
  for (const CandidateEntity &c : p.candidates) {
    for (std::string &r : kb.relations_of(c.id)) rel_set.insert(std::move(r));
  }
  if (rel_set.empty()) throw NoRelation();
  std::map<std::string, double> s_r;
  for (const std::string &r : rel_set) {
    const double s = models.relation->score(q.tokens, r);
    s_r.emplace(r, s);
    p.relation_scores.emplace_back(r, s);
  }
  // Highest score; the map is sorted, so ties keep the smallest name.
  std::string best_r;
  double best_s = 0.0;
  for (const auto &[r, s] : s_r) {
    if (best_r.empty() || s > best_s) {
      best_r = r;
      best_s = s;
    }
  }

  auto type_score = [&](const EntityId &id) {
    const auto t = kb.notable_type(id);
    return t ? models.type->score(q.tokens, *t) : 0.0;
  };
  // First entry of `ids` with the largest out-degree.
  auto top_by_degree = [&](const std::vector<std::size_t> &ids) {
    std::size_t pick = ids.front();
    for (std::size_t i : ids) {
      if (kb.out_degree(p.candidates[i].id) > kb.out_degree(p.candidates[pick].id)) pick = i;
    }
    return pick;
  };

  std::size_t chosen = 0;
  if (strategy == Strategy::kPqaType || strategy == Strategy::kPqaTypeOut) {
    // Score every candidate with its own best relation: S = S_t + S_r.
    struct Scored {
      std::size_t index;
      std::string relation;
      double sr, st;
    };
    std::vector<Scored> scored;
    for (std::size_t i = 0; i < p.candidates.size(); ++i) {
      const auto rels = kb.relations_of(p.candidates[i].id);
      if (rels.empty()) continue;
      const std::string *r_best = &rels.front();
      for (const std::string &r : rels) {
        if (s_r.at(r) > s_r.at(*r_best)) r_best = &r;
      }
      scored.push_back({i, *r_best, s_r.at(*r_best), type_score(p.candidates[i].id)});
    }
    std::size_t top = 0;
    for (std::size_t k = 1; k < scored.size(); ++k) {
      if (scored[k].sr + scored[k].st > scored[top].sr + scored[top].st) top = k;
    }
    if (strategy == Strategy::kPqaTypeOut) {
      const double s_top = scored[top].sr + scored[top].st;
      std::vector<std::size_t> tied;
      for (std::size_t k = 0; k < scored.size(); ++k) {
        if (std::abs(scored[k].sr + scored[k].st - s_top) <= kTieTolerance) tied.push_back(k);
      }
      for (std::size_t k : tied) {
        if (kb.out_degree(p.candidates[scored[k].index].id) >
            kb.out_degree(p.candidates[scored[top].index].id)) {
          top = k;
        }
      }
    }
    chosen = scored[top].index;
    p.relation = scored[top].relation;
    p.s_r = scored[top].sr;
    p.s_t = scored[top].st;
    p.s = scored[top].st + scored[top].sr;
  } else {
    std::vector<std::size_t> holders;
    for (std::size_t i = 0; i < p.candidates.size(); ++i) {
      if (kb.has_relation(p.candidates[i].id, best_r)) holders.push_back(i);
    }
    chosen = holders.front();
    if (strategy == Strategy::kPqaOut) {
      chosen = top_by_degree(holders);
    } else if (strategy == Strategy::kPqaOutType) {
      const std::size_t top_degree = kb.out_degree(p.candidates[top_by_degree(holders)].id);
      double best_t = 0.0;
      bool first = true;
      for (std::size_t i : holders) {
        if (kb.out_degree(p.candidates[i].id) != top_degree) continue;
        const double t = type_score(p.candidates[i].id);
        if (first || t > best_t + kTieTolerance) {
          chosen = i;
          best_t = t;
          first = false;
        }
      }
      p.s_t = best_t;
    }
    p.relation = best_r;
    p.s_r = best_s;
    p.s = p.s_t ? *p.s_t + best_s : best_s;
  }
  p.entity = p.candidates[chosen].id;
  p.objects = kb.lookup_objects(p.entity, p.relation);
  return p;
}

// -------------------------------------------------------------- snapshot

void save_pipeline(const std::string &path, const PipelineBundle &bundle) {
  nn::ParamStore all;
  internal::append_params(all, "tagger.", bundle.tagger.params());
  internal::append_params(all, "relation.", bundle.relation.params());
  json meta = {
      {"kind", "pipeline"},
      {"tagger", {{"config", internal::config_json(bundle.tagger.config())},
                  {"vocab", internal::vocab_json(bundle.tagger.vocab())}}},
      {"relation", {{"config", internal::config_json(bundle.relation.config())},
                    {"vocab", internal::vocab_json(bundle.relation.vocab())}}},
      {"type", nullptr},
  };
  if (bundle.type) {
    internal::append_params(all, "type.", bundle.type->params());
    meta["type"] = {{"config", internal::config_json(bundle.type->config())},
                    {"vocab", internal::vocab_json(bundle.type->vocab())}};
  }
  nn::save_model_snapshot(path, meta.dump(), all);
}

PipelineBundle load_pipeline(const std::string &path) {
  const nn::ModelSnapshot snap = nn::load_model_snapshot(path);
  json meta;
  try {
    meta = json::parse(snap.metadata);
    if (meta.at("kind") != "pipeline") throw SnapshotError(path + ": not a pipeline bundle");
    auto matcher = [&](const json &j, const std::string &prefix) {
      MatcherModel m = MatcherModel::create(internal::vocab_from_json(j.at("vocab")),
                                            internal::config_from_json(j.at("config")));
      nn::restore_params(internal::sub_snapshot(snap, prefix), m.params());
      return m;
    };
    const json &tj = meta.at("tagger");
    TaggerModel tagger = TaggerModel::create(internal::vocab_from_json(tj.at("vocab")),
                                             internal::config_from_json(tj.at("config")));
    nn::restore_params(internal::sub_snapshot(snap, "tagger."), tagger.params());
    PipelineBundle bundle{std::move(tagger), matcher(meta.at("relation"), "relation."),
                          std::nullopt};
    if (!meta.at("type").is_null()) bundle.type = matcher(meta.at("type"), "type.");
    return bundle;
  } catch (const json::exception &e) {
    throw SnapshotError(path + ": bad metadata: " + e.what());
  }
}

}  // namespace kbqa
