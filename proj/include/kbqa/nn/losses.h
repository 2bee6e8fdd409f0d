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

#ifndef KBQA_NN_LOSSES_H_
#define KBQA_NN_LOSSES_H_

#include <span>

#include "kbqa/nn/autograd.h"

namespace kbqa::nn {

// Probabilities are clamped to [kProbClamp, 1 - kProbClamp] inside logs.
inline constexpr double kProbClamp = 1e-12;

// Mean over the T rows of -ln probs[t, gold[t]]. With two classes this is
// the averaged y ln a + (1 - y) ln(1 - a) form.
Var categorical_ce(const Var &probs, std::span<const int> gold);
double loss_categorical_ce(const Tensor &probs, std::span<const int> gold);

// -(y ln a + (1 - y) ln(1 - a)) for one prediction a in (0,1).
Var binary_ce(const Var &a, int y);
double loss_binary_ce(double a, int y);

// max(0, s_neg + gamma - s_pos)
Var hinge(const Var &s_pos, const Var &s_neg, double gamma);
double loss_hinge_qas(double s_pos, double s_neg, double gamma);

// Per-channel hinge sum over (subject, predicate).
double loss_hinge_qat(double ss_pos, double ss_neg, double sp_pos, double sp_neg, double gamma);
// Per-channel hinge sum over (subject, predicate, type).
double loss_hinge_qat_type(double ss_pos, double ss_neg, double sp_pos, double sp_neg,
                           double st_pos, double st_neg, double gamma);

}  // namespace kbqa::nn

#endif  // KBQA_NN_LOSSES_H_
