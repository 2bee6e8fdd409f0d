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

#include "kbqa/nn/losses.h"

#include <algorithm>
#include <cmath>

#include "kbqa/errors.h"

namespace kbqa::nn {

namespace {

double Clamp(double p) { return std::clamp(p, kProbClamp, 1.0 - kProbClamp); }

void CheckGold(const Tensor &probs, std::span<const int> gold) {
  if (probs.rank() != 2 || probs.rows() != gold.size()) {
    throw ShapeMismatch("categorical_ce: " + shape_string(probs.shape()) + " vs " +
                        std::to_string(gold.size()) + " labels");
  }
  if (gold.empty()) throw ShapeMismatch("categorical_ce: no positions");
  for (int g : gold) {
    if (g < 0 || static_cast<std::size_t>(g) >= probs.cols()) {
      throw ShapeMismatch("categorical_ce: label out of range");
    }
  }
}

}  // namespace

double loss_categorical_ce(const Tensor &probs, std::span<const int> gold) {
  CheckGold(probs, gold);
  double total = 0.0;
  for (std::size_t t = 0; t < gold.size(); ++t) total -= std::log(Clamp(probs.at(t, gold[t])));
  return total / static_cast<double>(gold.size());
}

Var categorical_ce(const Var &probs, std::span<const int> gold) {
  const double value = loss_categorical_ce(probs->value, gold);
  std::vector<int> labels(gold.begin(), gold.end());
  auto node = std::make_shared<Node>();
  node->value = Tensor::scalar(value);
  if (probs->requires_grad) {
    node->requires_grad = true;
    node->parents = {probs};
    node->backward_fn = [labels](Node &self) {
      const Var &p = self.parents[0];
      Tensor &g = p->ensure_grad();
      const double n = static_cast<double>(labels.size());
      for (std::size_t t = 0; t < labels.size(); ++t) {
        const double v = p->value.at(t, labels[t]);
        if (v > kProbClamp && v < 1.0 - kProbClamp) {
          g.at(t, labels[t]) += self.grad[0] * (-1.0 / (n * v));
        }
      }
    };
  }
  return node;
}

double loss_binary_ce(double a, int y) {
  const double c = Clamp(a);
  return -(y * std::log(c) + (1 - y) * std::log(1.0 - c));
}

Var binary_ce(const Var &a, int y) {
  if (a->size() != 1) throw ShapeMismatch("binary_ce expects a scalar prediction");
  const double av = a->value[0];
  auto node = std::make_shared<Node>();
  node->value = Tensor::scalar(loss_binary_ce(av, y));
  if (a->requires_grad) {
    node->requires_grad = true;
    node->parents = {a};
    node->backward_fn = [y](Node &self) {
      const Var &p = self.parents[0];
      const double v = p->value[0];
      if (v <= kProbClamp || v >= 1.0 - kProbClamp) return;
      p->ensure_grad()[0] += self.grad[0] * (-(y / v) + (1 - y) / (1.0 - v));
    };
  }
  return node;
}

Var hinge(const Var &s_pos, const Var &s_neg, double gamma) {
  // Written as gamma - (pos - neg) so that a margin >= gamma gives exactly 0.
  return relu(add_scalar(scale(sub(s_pos, s_neg), -1.0), gamma));
}

double loss_hinge_qas(double s_pos, double s_neg, double gamma) {
  return std::max(0.0, gamma - (s_pos - s_neg));
}

double loss_hinge_qat(double ss_pos, double ss_neg, double sp_pos, double sp_neg,
                      double gamma) {
  return loss_hinge_qas(ss_pos, ss_neg, gamma) + loss_hinge_qas(sp_pos, sp_neg, gamma);
}

double loss_hinge_qat_type(double ss_pos, double ss_neg, double sp_pos, double sp_neg,
                           double st_pos, double st_neg, double gamma) {
  return loss_hinge_qat(ss_pos, ss_neg, sp_pos, sp_neg, gamma) +
         loss_hinge_qas(st_pos, st_neg, gamma);
}

}  // namespace kbqa::nn
