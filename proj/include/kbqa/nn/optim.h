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

#ifndef KBQA_NN_OPTIM_H_
#define KBQA_NN_OPTIM_H_

#include <cstddef>
#include <span>
#include <vector>

#include "kbqa/nn/autograd.h"

namespace kbqa::nn {

struct AdamConfig {
  double lr = 0.001;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
  // Rescales the joint gradient to this L2 norm when exceeded; 0 disables.
  double clip_norm = 0.0;
};

struct AdamState {
  AdamConfig config;
  std::size_t step = 0;
  std::vector<Tensor> m;  // first moments, one per parameter
  std::vector<Tensor> v;  // second moments
};

AdamState make_adam_state(std::span<const Var> params, AdamConfig config = {});

// One update from the gradients currently stored on `params`. Gradients are
// left in place; callers zero them.
void adam_step(std::span<const Var> params, AdamState &state);

double grad_norm(std::span<const Var> params);

}  // namespace kbqa::nn

#endif  // KBQA_NN_OPTIM_H_
