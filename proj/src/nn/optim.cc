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

#include "kbqa/nn/optim.h"

#include <cmath>

#include "kbqa/errors.h"

namespace kbqa::nn {

AdamState make_adam_state(std::span<const Var> params, AdamConfig config) {
  AdamState state;
  state.config = config;
  for (const Var &p : params) {
    state.m.emplace_back(p->shape());
    state.v.emplace_back(p->shape());
  }
  return state;
}

double grad_norm(std::span<const Var> params) {
  double sq = 0.0;
  for (const Var &p : params) {
    if (p->grad.size() != p->size()) continue;
    for (double g : p->grad.data()) sq += g * g;
  }
  return std::sqrt(sq);
}

void adam_step(std::span<const Var> params, AdamState &state) {
  if (state.m.size() != params.size()) throw ShapeMismatch("adam: state/parameter count differ");
  const AdamConfig &c = state.config;
  ++state.step;
  double factor = 1.0;
  if (c.clip_norm > 0.0) {
    const double norm = grad_norm(params);
    if (norm > c.clip_norm) factor = c.clip_norm / norm;
  }
  const double t = static_cast<double>(state.step);
  const double bias1 = 1.0 - std::pow(c.beta1, t);
  const double bias2 = 1.0 - std::pow(c.beta2, t);
  for (std::size_t k = 0; k < params.size(); ++k) {
    Node &p = *params[k];
    if (p.grad.size() != p.size()) continue;
    Tensor &m = state.m[k];
    Tensor &v = state.v[k];
    for (std::size_t i = 0; i < p.size(); ++i) {
      const double g = p.grad[i] * factor;
      m[i] = c.beta1 * m[i] + (1.0 - c.beta1) * g;
      v[i] = c.beta2 * v[i] + (1.0 - c.beta2) * g * g;
      p.value[i] -= c.lr * (m[i] / bias1) / (std::sqrt(v[i] / bias2) + c.eps);
    }
  }
}

}  // namespace kbqa::nn
