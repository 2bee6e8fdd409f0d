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

#ifndef KBQA_NN_GRADCHECK_H_
#define KBQA_NN_GRADCHECK_H_

#include <cstddef>
#include <functional>
#include <span>

#include "kbqa/nn/autograd.h"

namespace kbqa::nn {

struct GradCheckReport {
  double max_rel_error = 0.0;
  std::size_t checked = 0;
  std::size_t worst_param = 0;
  std::size_t worst_index = 0;
  double worst_analytic = 0.0;
  double worst_numeric = 0.0;
};

// Compares reverse-mode gradients of the scalar produced by `f` against
// central differences (f(x+eps) - f(x-eps)) / 2eps, one coordinate at a time.
// Relative error is |a - n| / max(|a|, |n|, floor).
GradCheckReport finite_diff_check(const std::function<Var()> &f, std::span<const Var> params,
                                  double eps = 1e-5, double floor = 1e-6);

}  // namespace kbqa::nn

#endif  // KBQA_NN_GRADCHECK_H_
