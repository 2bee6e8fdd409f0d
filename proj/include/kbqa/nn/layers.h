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

#ifndef KBQA_NN_LAYERS_H_
#define KBQA_NN_LAYERS_H_

#include <cstddef>
#include <istream>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "kbqa/nn/autograd.h"

namespace kbqa {
class Rng;
}

namespace kbqa::nn {

// Token -> row id. Row 0 is always the out-of-vocabulary row.
class Vocab {
 public:
  static constexpr std::size_t kOov = 0;
  static constexpr const char *kOovToken = "<unk>";

  Vocab();
  explicit Vocab(std::vector<std::string> tokens);  // tokens[0] must be kOovToken

  std::size_t add(const std::string &token);
  std::size_t index(const std::string &token) const;
  bool contains(const std::string &token) const { return ids_.count(token) != 0; }
  std::size_t size() const { return tokens_.size(); }
  const std::vector<std::string> &tokens() const { return tokens_; }

 private:
  std::vector<std::string> tokens_;
  std::map<std::string, std::size_t> ids_;
};

// Ordered, named parameters of one model.
class ParamStore {
 public:
  Var add(const std::string &name, Tensor init);
  Var uniform(const std::string &name, Shape shape, double limit, Rng &rng);
  Var zeros(const std::string &name, Shape shape);

  const Var &get(const std::string &name) const;
  bool contains(const std::string &name) const { return index_.count(name) != 0; }
  std::span<const Var> vars() const { return vars_; }
  const std::vector<std::string> &names() const { return names_; }
  std::size_t count() const { return vars_.size(); }
  std::size_t num_values() const;

  void zero_grad() const;

 private:
  std::vector<std::string> names_;
  std::vector<Var> vars_;
  std::map<std::string, std::size_t> index_;
};

struct EmbeddingTable {
  Vocab vocab;
  Var vectors;  // [V, d]

  std::size_t dim() const { return vectors->value.cols(); }
  Var lookup(const std::string &token) const;
  std::vector<Var> embed_rows(std::span<const std::string> tokens) const;
  // [T, d]; an empty sequence gives a [0, d] tensor.
  Var embed(std::span<const std::string> tokens) const;
};

EmbeddingTable make_embedding(ParamStore &store, const std::string &name, Vocab vocab,
                              std::size_t dim, Rng &rng, double limit = 0.1);

// Overwrites rows of known tokens from `token v1 ... vd` lines; returns the
// number of rows loaded. Throws DataError on a dimension mismatch.
std::size_t load_word_vectors(std::istream &in, EmbeddingTable &table);

enum class Activation { kNone, kRelu, kSigmoid };

struct DenseParams {
  Var weight;  // [out, in]
  Var bias;    // [out]
  Activation activation = Activation::kNone;

  Var forward(const Var &x) const;
};

DenseParams make_dense(ParamStore &store, const std::string &name, std::size_t in,
                       std::size_t out, Activation act, Rng &rng);

enum class CellKind { kGru, kLstm };
enum class Direction { kForward, kBackward };

// Per-gate input (W), recurrent (U) and bias (b) parameters.
//   GRU gates: z (update), r (reset), n (candidate)
//     h' = (1 - z) * h + z * tanh(Wn x + Un (r * h) + bn)
//   LSTM gates: i, f, o, g
//     c' = f * c + i * g,  h' = o * tanh(c')
struct RecurrentParams {
  struct Gate {
    Var w;  // [h, in]
    Var u;  // [h, h]
    Var b;  // [h]
  };

  CellKind kind = CellKind::kGru;
  std::size_t input_dim = 0;
  std::size_t hidden_dim = 0;
  std::vector<Gate> gates;  // 3 for GRU, 4 for LSTM

  Var gate_pre(std::size_t k, const Var &x, const Var &h) const;
};

RecurrentParams make_recurrent(ParamStore &store, const std::string &name, CellKind kind,
                               std::size_t input_dim, std::size_t hidden_dim, Rng &rng);

struct RecurrentOutput {
  Var states;  // [T, h], in input order for both directions
  Var last;    // [h], state after the final step of the run
};

// Runs the cell over the rows of `input` ([T, d]). A backward run reads the
// rows last to first; its states are reported back in input order.
RecurrentOutput recurrent_forward(const RecurrentParams &params, const Var &input,
                                  Direction direction = Direction::kForward);
RecurrentOutput recurrent_forward(const RecurrentParams &params, std::span<const Var> inputs,
                                  Direction direction = Direction::kForward);

struct BiOutput {
  Var states;  // [T, 2h]: forward state then backward state per position
  Var last;    // [2h]: forward last and backward last
};

BiOutput bidirectional_encode(const RecurrentParams &fwd, const RecurrentParams &bwd,
                              std::span<const Var> inputs);

// Scaled dot-product self-attention over a state sequence:
//   A = softmax_rows(H H^T / sqrt(h)),  out = A H.
Var self_attention(const Var &states);
// Attention weights only, for inspection.
Var attention_weights(const Var &states);

}  // namespace kbqa::nn

#endif  // KBQA_NN_LAYERS_H_
