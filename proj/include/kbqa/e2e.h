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

#ifndef KBQA_E2E_H_
#define KBQA_E2E_H_

#include <cstddef>
#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "kbqa/alias_index.h"
#include "kbqa/datagen.h"
#include "kbqa/kb_store.h"
#include "kbqa/nn/layers.h"
#include "kbqa/text.h"

namespace kbqa {

enum class HeadMode { kQas, kQat, kQatType };

struct E2EVariant {
  HeadMode head = HeadMode::kQat;
  bool char_level = false;
  bool self_attention = false;
  bool type_in_label = false;
  bool type_as_task = false;  // implies HeadMode::kQatType
  bool out_degree_sort = false;
};

// qa-s, qa-t, qa-t-w, qa-t-ws, qa-t-wt, qa-t-swt, qa-t-mwt, qa-t-mwst.
// Throws std::invalid_argument for anything else.
E2EVariant parse_variant(const std::string &name);
std::string variant_name(const E2EVariant &v);

struct E2EConfig {
  std::size_t word_dim = 16;
  std::size_t char_dim = 8;
  std::size_t char_hidden = 8;
  std::size_t hidden = 16;
  std::size_t t_max = 20;
  std::size_t epochs = 15;
  double lr = 0.002;
  double gamma = 0.5;
  double dropout = 0.05;
  double clip_norm = 5.0;
  std::uint64_t seed = 42;
  std::string word_vectors;
};

struct FactScore {
  Fact fact;
  double s_qs = 0.0;
  double s_qp = 0.0;
  std::optional<double> s_qt;
  double combined = 0.0;
};

// Scores candidate facts for one question.
class FactScorer {
 public:
  virtual ~FactScorer() = default;
  virtual std::vector<FactScore> score_facts(std::span<const std::string> question,
                                             std::span<const Fact> facts,
                                             const KnowledgeBase &kb) const = 0;
};

// Subject text: the primary alias, prefixed by the notable type when
// `type_in_label` is set ("musical recording germany").
Tokens subject_text(const KnowledgeBase &kb, const EntityId &id, bool type_in_label);

class E2EModel : public FactScorer {
 public:
  static E2EModel create(nn::Vocab words, nn::Vocab chars, const E2EVariant &variant,
                         const E2EConfig &cfg);

  // [d_w] or [d_w + char_hidden].
  nn::Var encode_word(const std::string &word) const;
  // Word encoder -> shared LSTM -> optional self-attention -> flatten to
  // t_max rows -> dense ReLU -> dropout. Throws EmptySequence.
  nn::Var encode_sequence(std::span<const std::string> tokens, bool train, Rng &rng) const;
  // Same pipeline without the dense layer: the flattened [t_max * hidden].
  nn::Var encode_flat(std::span<const std::string> tokens) const;

  // Head combination of channel scores.
  double combine(double s_qs, double s_qp, std::optional<double> s_qt) const;
  nn::Var combine(const nn::Var &s_qs, const nn::Var &s_qp) const;

  FactScore score_fact(std::span<const double> q_vec, const Fact &fact,
                       const KnowledgeBase &kb) const;
  std::vector<FactScore> score_facts(std::span<const std::string> question,
                                     std::span<const Fact> facts,
                                     const KnowledgeBase &kb) const override;

  const E2EVariant &variant() const { return variant_; }
  void set_variant(const E2EVariant &v) { variant_ = v; }
  const E2EConfig &config() const { return cfg_; }
  const nn::ParamStore &params() const { return *store_; }
  const nn::Vocab &word_vocab() const { return words_.vocab; }
  const nn::Vocab &char_vocab() const { return chars_.vocab; }
  nn::EmbeddingTable &word_table() { return words_; }
  // Head weights: W (qas) or w_a, w_b[, w_c] (qat).
  const nn::Var &head_weights() const { return head_; }

 private:
  E2EVariant variant_;
  E2EConfig cfg_;
  std::shared_ptr<nn::ParamStore> store_;
  nn::EmbeddingTable words_;
  nn::EmbeddingTable chars_;
  nn::RecurrentParams char_gru_;
  nn::RecurrentParams lstm_;
  nn::DenseParams dense_;
  nn::Var head_;
};

struct E2EStats {
  std::vector<double> epoch_loss;
  std::size_t skipped_channels = 0;
  // Mean |dL/dw_c| per step, type-as-task only.
  double type_grad_norm = 0.0;
};

// Each epoch pairs every entry of a question's predicate pool (without
// replacement) with a random subject negative. Throws EmptyTrainingSet.
E2EModel train_e2e(std::span<const QuestionInstance> questions, const NegativePools &pools,
                   const KnowledgeBase &kb, const E2EVariant &variant, const E2EConfig &cfg,
                   E2EStats *stats = nullptr);

// Candidate facts of every entity retrieved for the question, ranked by
// combined score. With out_degree_sort the facts tied at the top score are
// reordered by subject out-degree. Throws NoCandidates.
std::vector<FactScore> answer(const FactScorer &scorer, const KnowledgeBase &kb,
                              const AliasIndex &index, std::span<const std::string> question,
                              bool out_degree_sort, std::size_t k);

void save_e2e(const std::string &path, const E2EModel &model);
E2EModel load_e2e(const std::string &path);

}  // namespace kbqa

#endif  // KBQA_E2E_H_
