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

#ifndef KBQA_NN_AUTOGRAD_H_
#define KBQA_NN_AUTOGRAD_H_

#include <cstddef>
#include <functional>
#include <memory>
#include <span>
#include <vector>

#include "kbqa/nn/tensor.h"

namespace kbqa {
class Rng;
}

namespace kbqa::nn {

class Node;
using Var = std::shared_ptr<Node>;

// One value in a dynamically built computation graph. Leaves created with
// parameter() persist across graphs and accumulate gradients; everything
// else is rebuilt per forward pass and released with its root.
class Node {
 public:
  Tensor value;
  Tensor grad;
  bool requires_grad = false;
  std::vector<Var> parents;
  // Reads this->grad and adds into parents' grads.
  std::function<void(Node &)> backward_fn;

  Tensor &ensure_grad();
  const Shape &shape() const { return value.shape(); }
  std::size_t size() const { return value.size(); }
};

Var constant(Tensor t);
Var parameter(Tensor t);

double item(const Var &v);

// Reverse sweep from a size-1 root. Gradients accumulate (+=) into every
// reachable node that requires them.
void backward(const Var &root);
void zero_grad(std::span<const Var> params);

// Elementwise, equal shapes.
Var add(const Var &a, const Var &b);
Var sub(const Var &a, const Var &b);
Var mul(const Var &a, const Var &b);
Var scale(const Var &a, double s);
Var add_scalar(const Var &a, double s);
Var one_minus(const Var &a);

Var sigmoid(const Var &a);
Var tanh(const Var &a);
Var relu(const Var &a);
Var log(const Var &a);

// [m,k] x [k,n] -> [m,n]
Var matmul(const Var &a, const Var &b);
// [m,k] x [k] -> [m]
Var matvec(const Var &w, const Var &x);
Var transpose(const Var &a);

// Softmax over a vector, or over each row of a matrix.
Var softmax(const Var &a);

Var concat(std::span<const Var> parts);
Var slice(const Var &v, std::size_t begin, std::size_t len);
// Stacks T vectors of length h into [T,h]. T = 0 needs `width`.
Var stack_rows(std::span<const Var> rows, std::size_t width);
Var row(const Var &m, std::size_t i);
// Row `index` of a [V,d] table; gradient flows into that row only.
Var gather_row(const Var &table, std::size_t index);

Var sum(const Var &a);
Var dot(const Var &a, const Var &b);
// a.b / (|a||b|); zero (with zero gradient) when either norm is zero.
Var cosine(const Var &a, const Var &b);
double cosine(std::span<const double> a, std::span<const double> b);

// Pads [T,h] with zero rows (or truncates) to [t_max,h], then flattens
// row-major to [t_max*h].
Var flatten_padded(const Var &m, std::size_t t_max);

// Inverted dropout. Eval mode and p == 0 return `x` itself.
Var dropout(const Var &x, double p, bool train, Rng &rng);

}  // namespace kbqa::nn

#endif  // KBQA_NN_AUTOGRAD_H_
