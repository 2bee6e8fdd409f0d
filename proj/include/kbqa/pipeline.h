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

#ifndef KBQA_PIPELINE_H_
#define KBQA_PIPELINE_H_

#include <cstddef>
#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "kbqa/alias_index.h"
#include "kbqa/datagen.h"
#include "kbqa/kb_store.h"
#include "kbqa/nn/layers.h"
#include "kbqa/nn/snapshot.h"
#include "kbqa/text.h"

namespace kbqa {

struct TrainConfig {
  std::size_t embed_dim = 16;
  std::size_t hidden = 16;
  std::size_t epochs = 15;
  double lr = 0.005;
  double dropout = 0.1;
  double clip_norm = 5.0;
  std::uint64_t seed = 42;
  std::string word_vectors;  // optional "token v1 .. vd" file
};

struct TrainStats {
  std::vector<double> epoch_loss;  // mean per-example loss
};

// Interfaces the prediction algorithms depend on.
class EntityTagger {
 public:
  virtual ~EntityTagger() = default;
  virtual LabeledQuestion tag(std::span<const std::string> tokens) const = 0;
};

class TextMatcher {
 public:
  virtual ~TextMatcher() = default;
  // Matching score of a question and a relation or type label.
  virtual double score(std::span<const std::string> question,
                       const std::string &candidate) const = 0;
};

// Embedding -> BiLSTM -> per-token softmax over {e, c}.
class TaggerModel : public EntityTagger {
 public:
  static TaggerModel create(nn::Vocab vocab, const TrainConfig &cfg);

  // [T, 2] probabilities; column 0 is 'e'.
  nn::Var probs(std::span<const std::string> tokens) const;
  LabeledQuestion tag(std::span<const std::string> tokens) const override;

  const nn::ParamStore &params() const { return *store_; }
  const nn::Vocab &vocab() const { return embed_.vocab; }
  const TrainConfig &config() const { return cfg_; }
  nn::EmbeddingTable &embedding() { return embed_; }

 private:
  TrainConfig cfg_;
  std::shared_ptr<nn::ParamStore> store_;
  nn::EmbeddingTable embed_;
  nn::RecurrentParams fwd_, bwd_;
  nn::DenseParams head_;
};

// Embedding -> BiGRU (shared by both inputs) -> [q ; c] -> dense ReLU ->
// dropout -> dense sigmoid.
class MatcherModel : public TextMatcher {
 public:
  static MatcherModel create(nn::Vocab vocab, const TrainConfig &cfg);

  nn::Var forward(std::span<const std::string> question, std::span<const std::string> candidate,
                  bool train, Rng &rng) const;
  double score(std::span<const std::string> question,
               const std::string &candidate) const override;

  const nn::ParamStore &params() const { return *store_; }
  const nn::Vocab &vocab() const { return embed_.vocab; }
  const TrainConfig &config() const { return cfg_; }
  nn::EmbeddingTable &embedding() { return embed_; }

 private:
  nn::Var encode(std::span<const std::string> tokens) const;

  TrainConfig cfg_;
  std::shared_ptr<nn::ParamStore> store_;
  nn::EmbeddingTable embed_;
  nn::RecurrentParams fwd_, bwd_;
  nn::DenseParams hidden_, out_;
};

// Throws EmptyTrainingSet.
TaggerModel train_tagger(std::span<const LabeledQuestion> data, const TrainConfig &cfg,
                         TrainStats *stats = nullptr);
MatcherModel train_matcher(std::span<const MatchPair> pairs, const TrainConfig &cfg,
                           TrainStats *stats = nullptr);

LabeledQuestion tag_question(const EntityTagger &tagger, const QuestionInstance &q);

enum class Strategy { kPqa, kPqaOut, kPqaType, kPqaOutType, kPqaTypeOut };

std::string strategy_name(Strategy s);
// Throws std::invalid_argument for an unknown name.
Strategy parse_strategy(const std::string &name);
bool strategy_uses_type(Strategy s);

struct PipelineModels {
  const EntityTagger *tagger = nullptr;
  const TextMatcher *relation = nullptr;
  const TextMatcher *type = nullptr;  // required by the type strategies
};

struct Prediction {
  EntityId entity;
  std::string relation;
  double s_r = 0.0;
  std::optional<double> s_t;
  double s = 0.0;  // s_r, or s_t + s_r
  std::vector<EntityId> objects;
  std::string strategy;
  // Trace.
  std::vector<std::string> spans;
  std::vector<CandidateEntity> candidates;                    // E, in candidate order
  std::vector<std::pair<std::string, double>> relation_scores;  // R, sorted
};

// Entity candidates for a question: the union of span retrievals in
// candidate order. With no spans, or no hits, the whole question is used.
std::vector<CandidateEntity> collect_candidates(const AliasIndex &index,
                                                std::span<const std::string> tokens,
                                                std::span<const std::string> spans);

// Throws NoCandidates / NoRelation.
Prediction predict(Strategy strategy, const QuestionInstance &q, const PipelineModels &models,
                   const KnowledgeBase &kb, const AliasIndex &index);

inline Prediction predict_p_qa(const QuestionInstance &q, const PipelineModels &m,
                               const KnowledgeBase &kb, const AliasIndex &index) {
  return predict(Strategy::kPqa, q, m, kb, index);
}
inline Prediction predict_p_qa_out(const QuestionInstance &q, const PipelineModels &m,
                                   const KnowledgeBase &kb, const AliasIndex &index) {
  return predict(Strategy::kPqaOut, q, m, kb, index);
}
inline Prediction predict_p_qa_type(const QuestionInstance &q, const PipelineModels &m,
                                    const KnowledgeBase &kb, const AliasIndex &index) {
  return predict(Strategy::kPqaType, q, m, kb, index);
}

enum class ComboOrder { kOutThenType, kTypeThenOut };
inline Prediction predict_combo(ComboOrder order, const QuestionInstance &q,
                                const PipelineModels &m, const KnowledgeBase &kb,
                                const AliasIndex &index) {
  return predict(order == ComboOrder::kOutThenType ? Strategy::kPqaOutType
                                                   : Strategy::kPqaTypeOut,
                 q, m, kb, index);
}

// Trained pipeline, stored as one "NNQA1" file.
struct PipelineBundle {
  TaggerModel tagger;
  MatcherModel relation;
  std::optional<MatcherModel> type;

  PipelineModels models() const {
    return {&tagger, &relation, type ? &*type : nullptr};
  }
};

void save_pipeline(const std::string &path, const PipelineBundle &bundle);
PipelineBundle load_pipeline(const std::string &path);

}  // namespace kbqa

#endif  // KBQA_PIPELINE_H_
