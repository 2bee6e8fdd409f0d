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

#include "kbqa/nn/layers.h"

#include <cmath>
#include <sstream>

#include "kbqa/errors.h"
#include "kbqa/rng.h"

namespace kbqa::nn {

Vocab::Vocab() { add(kOovToken); }

Vocab::Vocab(std::vector<std::string> tokens) {
  if (tokens.empty() || tokens.front() != kOovToken) {
    throw DataError("vocabulary must start with the OOV token");
  }
  for (auto &t : tokens) add(t);
}

std::size_t Vocab::add(const std::string &token) {
  auto [it, inserted] = ids_.emplace(token, tokens_.size());
  if (inserted) tokens_.push_back(token);
  return it->second;
}

std::size_t Vocab::index(const std::string &token) const {
  auto it = ids_.find(token);
  return it == ids_.end() ? kOov : it->second;
}

Var ParamStore::add(const std::string &name, Tensor init) {
  if (index_.count(name) != 0) throw Error("duplicate parameter " + name);
  index_[name] = vars_.size();
  names_.push_back(name);
  vars_.push_back(parameter(std::move(init)));
  return vars_.back();
}

Var ParamStore::uniform(const std::string &name, Shape shape, double limit, Rng &rng) {
  Tensor t(std::move(shape));
  for (std::size_t i = 0; i < t.size(); ++i) t[i] = rng.uniform(-limit, limit);
  return add(name, std::move(t));
}

Var ParamStore::zeros(const std::string &name, Shape shape) {
  return add(name, Tensor(std::move(shape)));
}

const Var &ParamStore::get(const std::string &name) const {
  auto it = index_.find(name);
  if (it == index_.end()) throw Error("unknown parameter " + name);
  return vars_[it->second];
}

std::size_t ParamStore::num_values() const {
  std::size_t n = 0;
  for (const Var &v : vars_) n += v->size();
  return n;
}

void ParamStore::zero_grad() const { nn::zero_grad(vars_); }

Var EmbeddingTable::lookup(const std::string &token) const {
  return gather_row(vectors, vocab.index(token));
}

std::vector<Var> EmbeddingTable::embed_rows(std::span<const std::string> tokens) const {
  std::vector<Var> rows;
  rows.reserve(tokens.size());
  for (const auto &t : tokens) rows.push_back(lookup(t));
  return rows;
}

Var EmbeddingTable::embed(std::span<const std::string> tokens) const {
  return stack_rows(embed_rows(tokens), dim());
}

EmbeddingTable make_embedding(ParamStore &store, const std::string &name, Vocab vocab,
                              std::size_t dim, Rng &rng, double limit) {
  EmbeddingTable table;
  const std::size_t v = vocab.size();
  table.vocab = std::move(vocab);
  table.vectors = store.uniform(name, {v, dim}, limit, rng);
  return table;
}

std::size_t load_word_vectors(std::istream &in, EmbeddingTable &table) {
  std::string line;
  std::size_t loaded = 0, line_no = 0;
  const std::size_t d = table.dim();
  while (std::getline(in, line)) {
    ++line_no;
    std::istringstream fields(line);
    std::string token;
    if (!(fields >> token)) continue;
    std::vector<double> values;
    double x;
    while (fields >> x) values.push_back(x);
    if (values.size() != d) {
      throw ParseError(line_no, "word vector has " + std::to_string(values.size()) +
                                    " values, expected " + std::to_string(d));
    }
    if (!table.vocab.contains(token)) continue;
    auto row = table.vectors->value.row(table.vocab.index(token));
    std::copy(values.begin(), values.end(), row.begin());
    ++loaded;
  }
  return loaded;
}

Var DenseParams::forward(const Var &x) const {
  Var y = add(matvec(weight, x), bias);
  switch (activation) {
    case Activation::kRelu: return relu(y);
    case Activation::kSigmoid: return sigmoid(y);
    case Activation::kNone: break;
  }
  return y;
}

DenseParams make_dense(ParamStore &store, const std::string &name, std::size_t in,
                       std::size_t out, Activation act, Rng &rng) {
  const double limit = std::sqrt(6.0 / static_cast<double>(in + out));
  DenseParams d;
  d.weight = store.uniform(name + ".W", {out, in}, limit, rng);
  d.bias = store.zeros(name + ".b", {out});
  d.activation = act;
  return d;
}

Var RecurrentParams::gate_pre(std::size_t k, const Var &x, const Var &h) const {
  const Gate &g = gates[k];
  return add(add(matvec(g.w, x), matvec(g.u, h)), g.b);
}

RecurrentParams make_recurrent(ParamStore &store, const std::string &name, CellKind kind,
                               std::size_t input_dim, std::size_t hidden_dim, Rng &rng) {
  static const char *kGruGates[] = {"z", "r", "n"};
  static const char *kLstmGates[] = {"i", "f", "o", "g"};
  RecurrentParams p;
  p.kind = kind;
  p.input_dim = input_dim;
  p.hidden_dim = hidden_dim;
  const double limit = 1.0 / std::sqrt(static_cast<double>(hidden_dim));
  const std::size_t n = kind == CellKind::kGru ? 3 : 4;
  for (std::size_t k = 0; k < n; ++k) {
    const std::string gate = kind == CellKind::kGru ? kGruGates[k] : kLstmGates[k];
    RecurrentParams::Gate g;
    g.w = store.uniform(name + ".W_" + gate, {hidden_dim, input_dim}, limit, rng);
    g.u = store.uniform(name + ".U_" + gate, {hidden_dim, hidden_dim}, limit, rng);
    g.b = store.zeros(name + ".b_" + gate, {hidden_dim});
    p.gates.push_back(std::move(g));
  }
  return p;
}

RecurrentOutput recurrent_forward(const RecurrentParams &params, std::span<const Var> inputs,
                                  Direction direction) {
  const std::size_t hd = params.hidden_dim;
  const std::size_t expected_gates = params.kind == CellKind::kGru ? 3 : 4;
  if (params.gates.size() != expected_gates) throw ShapeMismatch("recurrent: wrong gate count");
  Var h = constant(Tensor({hd}));
  Var c = constant(Tensor({hd}));
  const std::size_t t_len = inputs.size();
  std::vector<Var> states(t_len);
  for (std::size_t step = 0; step < t_len; ++step) {
    const std::size_t t = direction == Direction::kForward ? step : t_len - 1 - step;
    const Var &x = inputs[t];
    if (x->size() != params.input_dim) {
      throw ShapeMismatch("recurrent input has width " + std::to_string(x->size()) +
                          ", expected " + std::to_string(params.input_dim));
    }
    if (params.kind == CellKind::kGru) {
      Var z = sigmoid(params.gate_pre(0, x, h));
      Var r = sigmoid(params.gate_pre(1, x, h));
      Var n = tanh(params.gate_pre(2, x, mul(r, h)));
      h = add(mul(one_minus(z), h), mul(z, n));
    } else {
      Var i = sigmoid(params.gate_pre(0, x, h));
      Var f = sigmoid(params.gate_pre(1, x, h));
      Var o = sigmoid(params.gate_pre(2, x, h));
      Var g = tanh(params.gate_pre(3, x, h));
      c = add(mul(f, c), mul(i, g));
      h = mul(o, tanh(c));
    }
    states[t] = h;
  }
  return RecurrentOutput{stack_rows(states, hd), h};
}

RecurrentOutput recurrent_forward(const RecurrentParams &params, const Var &input,
                                  Direction direction) {
  if (input->value.rank() != 2) throw ShapeMismatch("recurrent input must be [T, d]");
  std::vector<Var> rows;
  for (std::size_t t = 0; t < input->value.rows(); ++t) rows.push_back(row(input, t));
  return recurrent_forward(params, rows, direction);
}

BiOutput bidirectional_encode(const RecurrentParams &fwd, const RecurrentParams &bwd,
                              std::span<const Var> inputs) {
  RecurrentOutput f = recurrent_forward(fwd, inputs, Direction::kForward);
  RecurrentOutput b = recurrent_forward(bwd, inputs, Direction::kBackward);
  std::vector<Var> rows;
  for (std::size_t t = 0; t < inputs.size(); ++t) {
    const Var parts[] = {row(f.states, t), row(b.states, t)};
    rows.push_back(concat(parts));
  }
  const Var last_parts[] = {f.last, b.last};
  return BiOutput{stack_rows(rows, fwd.hidden_dim + bwd.hidden_dim), concat(last_parts)};
}

Var attention_weights(const Var &states) {
  if (states->value.rank() != 2) throw ShapeMismatch("self_attention expects [T, h]");
  const double h = static_cast<double>(states->value.cols());
  return softmax(scale(matmul(states, transpose(states)), 1.0 / std::sqrt(h)));
}

Var self_attention(const Var &states) {
  if (states->value.rank() != 2) throw ShapeMismatch("self_attention expects [T, h]");
  if (states->value.rows() == 0) return states;
  return matmul(attention_weights(states), states);
}

}  // namespace kbqa::nn
