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

#include "kbqa/nn/autograd.h"

#include <algorithm>
#include <cmath>
#include <unordered_set>

#include "kbqa/errors.h"
#include "kbqa/rng.h"

namespace kbqa::nn {

namespace {

Var MakeNode(Tensor value, std::vector<Var> parents, std::function<void(Node &)> fn) {
  auto node = std::make_shared<Node>();
  node->value = std::move(value);
  for (const Var &p : parents) {
    if (p->requires_grad) node->requires_grad = true;
  }
  if (node->requires_grad) {
    node->parents = std::move(parents);
    node->backward_fn = std::move(fn);
  }
  return node;
}

void RequireSameShape(const Var &a, const Var &b, const char *op) {
  if (a->shape() != b->shape()) {
    throw ShapeMismatch(std::string(op) + ": " + shape_string(a->shape()) + " vs " +
                        shape_string(b->shape()));
  }
}

void RequireRank(const Var &a, std::size_t rank, const char *op) {
  if (a->value.rank() != rank) {
    throw ShapeMismatch(std::string(op) + ": expected rank " + std::to_string(rank) +
                        ", got " + shape_string(a->shape()));
  }
}

// Applies fn(out_value) elementwise with derivative expressed via (x, y).
template <typename F, typename D>
Var Unary(const Var &a, F f, D dfdx) {
  Tensor out(a->shape());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = f(a->value[i]);
  return MakeNode(std::move(out), {a}, [dfdx](Node &self) {
    const Var &x = self.parents[0];
    if (!x->requires_grad) return;
    Tensor &gx = x->ensure_grad();
    for (std::size_t i = 0; i < gx.size(); ++i) {
      gx[i] += self.grad[i] * dfdx(x->value[i], self.value[i]);
    }
  });
}

}  // namespace

Tensor &Node::ensure_grad() {
  if (grad.shape() != value.shape()) grad = Tensor(value.shape());
  return grad;
}

Var constant(Tensor t) {
  auto node = std::make_shared<Node>();
  node->value = std::move(t);
  return node;
}

Var parameter(Tensor t) {
  auto node = std::make_shared<Node>();
  node->value = std::move(t);
  node->requires_grad = true;
  node->ensure_grad();
  return node;
}

double item(const Var &v) {
  if (v->size() != 1) throw ShapeMismatch("item() on tensor of shape " + shape_string(v->shape()));
  return v->value[0];
}

void backward(const Var &root) {
  if (root->size() != 1) throw ShapeMismatch("backward() needs a scalar root");
  if (!root->requires_grad) return;

  // Iterative post-order DFS gives a topological order.
  std::vector<Node *> order;
  std::unordered_set<Node *> visited;
  std::vector<std::pair<Node *, std::size_t>> stack{{root.get(), 0}};
  visited.insert(root.get());
  while (!stack.empty()) {
    auto &[node, next] = stack.back();
    if (next < node->parents.size()) {
      Node *p = node->parents[next++].get();
      if (p->requires_grad && !p->parents.empty() && visited.insert(p).second) {
        stack.emplace_back(p, 0);
      }
      continue;
    }
    order.push_back(node);
    stack.pop_back();
  }

  root->ensure_grad()[0] += 1.0;
  for (auto it = order.rbegin(); it != order.rend(); ++it) {
    Node *node = *it;
    if (node->backward_fn && node->grad.size() == node->value.size()) {
      node->backward_fn(*node);
    }
  }
}

void zero_grad(std::span<const Var> params) {
  for (const Var &p : params) p->ensure_grad().fill(0.0);
}

Var add(const Var &a, const Var &b) {
  RequireSameShape(a, b, "add");
  Tensor out(a->shape());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = a->value[i] + b->value[i];
  return MakeNode(std::move(out), {a, b}, [](Node &self) {
    for (const Var &p : self.parents) {
      if (!p->requires_grad) continue;
      Tensor &g = p->ensure_grad();
      for (std::size_t i = 0; i < g.size(); ++i) g[i] += self.grad[i];
    }
  });
}

Var sub(const Var &a, const Var &b) {
  RequireSameShape(a, b, "sub");
  Tensor out(a->shape());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = a->value[i] - b->value[i];
  return MakeNode(std::move(out), {a, b}, [](Node &self) {
    const double sign[2] = {1.0, -1.0};
    for (int k = 0; k < 2; ++k) {
      const Var &p = self.parents[k];
      if (!p->requires_grad) continue;
      Tensor &g = p->ensure_grad();
      for (std::size_t i = 0; i < g.size(); ++i) g[i] += sign[k] * self.grad[i];
    }
  });
}

Var mul(const Var &a, const Var &b) {
  RequireSameShape(a, b, "mul");
  Tensor out(a->shape());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = a->value[i] * b->value[i];
  return MakeNode(std::move(out), {a, b}, [](Node &self) {
    const Var &x = self.parents[0];
    const Var &y = self.parents[1];
    if (x->requires_grad) {
      Tensor &g = x->ensure_grad();
      for (std::size_t i = 0; i < g.size(); ++i) g[i] += self.grad[i] * y->value[i];
    }
    if (y->requires_grad) {
      Tensor &g = y->ensure_grad();
      for (std::size_t i = 0; i < g.size(); ++i) g[i] += self.grad[i] * x->value[i];
    }
  });
}

Var scale(const Var &a, double s) {
  return Unary(a, [s](double x) { return s * x; }, [s](double, double) { return s; });
}

Var add_scalar(const Var &a, double s) {
  return Unary(a, [s](double x) { return x + s; }, [](double, double) { return 1.0; });
}

Var one_minus(const Var &a) {
  return Unary(a, [](double x) { return 1.0 - x; }, [](double, double) { return -1.0; });
}

Var sigmoid(const Var &a) {
  return Unary(
      a,
      [](double x) {
        if (x >= 0) return 1.0 / (1.0 + std::exp(-x));
        const double e = std::exp(x);
        return e / (1.0 + e);
      },
      [](double, double y) { return y * (1.0 - y); });
}

Var tanh(const Var &a) {
  return Unary(a, [](double x) { return std::tanh(x); },
               [](double, double y) { return 1.0 - y * y; });
}

Var relu(const Var &a) {
  return Unary(a, [](double x) { return x > 0 ? x : 0.0; },
               [](double x, double) { return x > 0 ? 1.0 : 0.0; });
}

Var log(const Var &a) {
  return Unary(a, [](double x) { return std::log(x); },
               [](double x, double) { return 1.0 / x; });
}

Var matmul(const Var &a, const Var &b) {
  RequireRank(a, 2, "matmul");
  RequireRank(b, 2, "matmul");
  const std::size_t m = a->value.rows(), k = a->value.cols(), n = b->value.cols();
  if (b->value.rows() != k) {
    throw ShapeMismatch("matmul: " + shape_string(a->shape()) + " x " + shape_string(b->shape()));
  }
  Tensor out({m, n});
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t p = 0; p < k; ++p) {
      const double av = a->value.at(i, p);
      if (av == 0.0) continue;
      for (std::size_t j = 0; j < n; ++j) out.at(i, j) += av * b->value.at(p, j);
    }
  }
  return MakeNode(std::move(out), {a, b}, [m, k, n](Node &self) {
    const Var &x = self.parents[0];
    const Var &y = self.parents[1];
    if (x->requires_grad) {
      Tensor &g = x->ensure_grad();
      for (std::size_t i = 0; i < m; ++i)
        for (std::size_t p = 0; p < k; ++p) {
          double acc = 0.0;
          for (std::size_t j = 0; j < n; ++j) acc += self.grad.at(i, j) * y->value.at(p, j);
          g.at(i, p) += acc;
        }
    }
    if (y->requires_grad) {
      Tensor &g = y->ensure_grad();
      for (std::size_t i = 0; i < m; ++i)
        for (std::size_t p = 0; p < k; ++p) {
          const double xv = x->value.at(i, p);
          for (std::size_t j = 0; j < n; ++j) g.at(p, j) += xv * self.grad.at(i, j);
        }
    }
  });
}

Var matvec(const Var &w, const Var &x) {
  RequireRank(w, 2, "matvec");
  RequireRank(x, 1, "matvec");
  const std::size_t m = w->value.rows(), k = w->value.cols();
  if (x->size() != k) {
    throw ShapeMismatch("matvec: " + shape_string(w->shape()) + " x " + shape_string(x->shape()));
  }
  Tensor out({m});
  for (std::size_t i = 0; i < m; ++i) {
    double acc = 0.0;
    const auto wr = w->value.row(i);
    for (std::size_t j = 0; j < k; ++j) acc += wr[j] * x->value[j];
    out[i] = acc;
  }
  return MakeNode(std::move(out), {w, x}, [m, k](Node &self) {
    const Var &wv = self.parents[0];
    const Var &xv = self.parents[1];
    if (wv->requires_grad) {
      Tensor &g = wv->ensure_grad();
      for (std::size_t i = 0; i < m; ++i) {
        const double gi = self.grad[i];
        if (gi == 0.0) continue;
        auto gr = g.row(i);
        for (std::size_t j = 0; j < k; ++j) gr[j] += gi * xv->value[j];
      }
    }
    if (xv->requires_grad) {
      Tensor &g = xv->ensure_grad();
      for (std::size_t i = 0; i < m; ++i) {
        const double gi = self.grad[i];
        const auto wr = wv->value.row(i);
        for (std::size_t j = 0; j < k; ++j) g[j] += gi * wr[j];
      }
    }
  });
}

Var transpose(const Var &a) {
  RequireRank(a, 2, "transpose");
  const std::size_t r = a->value.rows(), c = a->value.cols();
  Tensor out({c, r});
  for (std::size_t i = 0; i < r; ++i)
    for (std::size_t j = 0; j < c; ++j) out.at(j, i) = a->value.at(i, j);
  return MakeNode(std::move(out), {a}, [r, c](Node &self) {
    const Var &x = self.parents[0];
    if (!x->requires_grad) return;
    Tensor &g = x->ensure_grad();
    for (std::size_t i = 0; i < r; ++i)
      for (std::size_t j = 0; j < c; ++j) g.at(i, j) += self.grad.at(j, i);
  });
}

Var softmax(const Var &a) {
  if (a->value.rank() != 1 && a->value.rank() != 2) {
    throw ShapeMismatch("softmax: rank must be 1 or 2");
  }
  const std::size_t rows = a->value.rank() == 1 ? 1 : a->value.rows();
  const std::size_t cols = a->value.rank() == 1 ? a->size() : a->value.cols();
  Tensor out(a->shape());
  for (std::size_t r = 0; r < rows; ++r) {
    const double *x = a->value.data().data() + r * cols;
    double *y = out.data().data() + r * cols;
    double mx = -INFINITY;
    for (std::size_t j = 0; j < cols; ++j) mx = std::max(mx, x[j]);
    double total = 0.0;
    for (std::size_t j = 0; j < cols; ++j) total += (y[j] = std::exp(x[j] - mx));
    for (std::size_t j = 0; j < cols; ++j) y[j] /= total;
  }
  return MakeNode(std::move(out), {a}, [rows, cols](Node &self) {
    const Var &x = self.parents[0];
    if (!x->requires_grad) return;
    Tensor &g = x->ensure_grad();
    for (std::size_t r = 0; r < rows; ++r) {
      const double *y = self.value.data().data() + r * cols;
      const double *gy = self.grad.data().data() + r * cols;
      double inner = 0.0;
      for (std::size_t j = 0; j < cols; ++j) inner += gy[j] * y[j];
      for (std::size_t j = 0; j < cols; ++j) g[r * cols + j] += y[j] * (gy[j] - inner);
    }
  });
}

Var concat(std::span<const Var> parts) {
  std::vector<double> data;
  std::vector<std::size_t> sizes;
  for (const Var &p : parts) {
    RequireRank(p, 1, "concat");
    data.insert(data.end(), p->value.data().begin(), p->value.data().end());
    sizes.push_back(p->size());
  }
  std::vector<Var> parents(parts.begin(), parts.end());
  return MakeNode(Tensor::vector(std::move(data)), std::move(parents),
                  [sizes](Node &self) {
                    std::size_t off = 0;
                    for (std::size_t k = 0; k < self.parents.size(); ++k) {
                      const Var &p = self.parents[k];
                      if (p->requires_grad) {
                        Tensor &g = p->ensure_grad();
                        for (std::size_t i = 0; i < sizes[k]; ++i) g[i] += self.grad[off + i];
                      }
                      off += sizes[k];
                    }
                  });
}

Var slice(const Var &v, std::size_t begin, std::size_t len) {
  RequireRank(v, 1, "slice");
  if (begin + len > v->size()) throw ShapeMismatch("slice out of range");
  std::vector<double> data(v->value.data().begin() + begin,
                           v->value.data().begin() + begin + len);
  return MakeNode(Tensor::vector(std::move(data)), {v}, [begin, len](Node &self) {
    const Var &x = self.parents[0];
    if (!x->requires_grad) return;
    Tensor &g = x->ensure_grad();
    for (std::size_t i = 0; i < len; ++i) g[begin + i] += self.grad[i];
  });
}

Var stack_rows(std::span<const Var> rows, std::size_t width) {
  if (!rows.empty()) width = rows.front()->size();
  Tensor out({rows.size(), width});
  for (std::size_t r = 0; r < rows.size(); ++r) {
    RequireRank(rows[r], 1, "stack_rows");
    if (rows[r]->size() != width) throw ShapeMismatch("stack_rows: ragged rows");
    std::copy(rows[r]->value.data().begin(), rows[r]->value.data().end(),
              out.row(r).begin());
  }
  std::vector<Var> parents(rows.begin(), rows.end());
  return MakeNode(std::move(out), std::move(parents), [width](Node &self) {
    for (std::size_t r = 0; r < self.parents.size(); ++r) {
      const Var &p = self.parents[r];
      if (!p->requires_grad) continue;
      Tensor &g = p->ensure_grad();
      for (std::size_t j = 0; j < width; ++j) g[j] += self.grad.at(r, j);
    }
  });
}

Var row(const Var &m, std::size_t i) {
  RequireRank(m, 2, "row");
  if (i >= m->value.rows()) throw ShapeMismatch("row index out of range");
  const auto src = m->value.row(i);
  return MakeNode(Tensor::vector({src.begin(), src.end()}), {m}, [i](Node &self) {
    const Var &x = self.parents[0];
    if (!x->requires_grad) return;
    auto g = x->ensure_grad().row(i);
    for (std::size_t j = 0; j < g.size(); ++j) g[j] += self.grad[j];
  });
}

Var gather_row(const Var &table, std::size_t index) { return row(table, index); }

Var sum(const Var &a) {
  double total = 0.0;
  for (double x : a->value.data()) total += x;
  return MakeNode(Tensor::scalar(total), {a}, [](Node &self) {
    const Var &x = self.parents[0];
    if (!x->requires_grad) return;
    Tensor &g = x->ensure_grad();
    for (std::size_t i = 0; i < g.size(); ++i) g[i] += self.grad[0];
  });
}

Var dot(const Var &a, const Var &b) {
  RequireSameShape(a, b, "dot");
  double total = 0.0;
  for (std::size_t i = 0; i < a->size(); ++i) total += a->value[i] * b->value[i];
  return MakeNode(Tensor::scalar(total), {a, b}, [](Node &self) {
    const Var &x = self.parents[0];
    const Var &y = self.parents[1];
    const double g0 = self.grad[0];
    if (x->requires_grad) {
      Tensor &g = x->ensure_grad();
      for (std::size_t i = 0; i < g.size(); ++i) g[i] += g0 * y->value[i];
    }
    if (y->requires_grad) {
      Tensor &g = y->ensure_grad();
      for (std::size_t i = 0; i < g.size(); ++i) g[i] += g0 * x->value[i];
    }
  });
}

double cosine(std::span<const double> a, std::span<const double> b) {
  double ab = 0.0, aa = 0.0, bb = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    ab += a[i] * b[i];
    aa += a[i] * a[i];
    bb += b[i] * b[i];
  }
  if (aa == 0.0 || bb == 0.0) return 0.0;
  return std::clamp(ab / (std::sqrt(aa) * std::sqrt(bb)), -1.0, 1.0);
}

Var cosine(const Var &a, const Var &b) {
  RequireSameShape(a, b, "cosine");
  double ab = 0.0, aa = 0.0, bb = 0.0;
  for (std::size_t i = 0; i < a->size(); ++i) {
    ab += a->value[i] * b->value[i];
    aa += a->value[i] * a->value[i];
    bb += b->value[i] * b->value[i];
  }
  const double na = std::sqrt(aa), nb = std::sqrt(bb);
  const bool degenerate = aa == 0.0 || bb == 0.0;
  const double c = degenerate ? 0.0 : ab / (na * nb);
  return MakeNode(Tensor::scalar(c), {a, b}, [na, nb, c, degenerate](Node &self) {
    if (degenerate) return;
    const Var &x = self.parents[0];
    const Var &y = self.parents[1];
    const double g0 = self.grad[0];
    if (x->requires_grad) {
      Tensor &g = x->ensure_grad();
      for (std::size_t i = 0; i < g.size(); ++i) {
        g[i] += g0 * (y->value[i] / (na * nb) - c * x->value[i] / (na * na));
      }
    }
    if (y->requires_grad) {
      Tensor &g = y->ensure_grad();
      for (std::size_t i = 0; i < g.size(); ++i) {
        g[i] += g0 * (x->value[i] / (na * nb) - c * y->value[i] / (nb * nb));
      }
    }
  });
}

Var flatten_padded(const Var &m, std::size_t t_max) {
  RequireRank(m, 2, "flatten_padded");
  const std::size_t h = m->value.cols();
  const std::size_t used = std::min(m->value.rows(), t_max);
  Tensor out({t_max * h});
  for (std::size_t r = 0; r < used; ++r)
    for (std::size_t j = 0; j < h; ++j) out[r * h + j] = m->value.at(r, j);
  return MakeNode(std::move(out), {m}, [used, h](Node &self) {
    const Var &x = self.parents[0];
    if (!x->requires_grad) return;
    Tensor &g = x->ensure_grad();
    for (std::size_t r = 0; r < used; ++r)
      for (std::size_t j = 0; j < h; ++j) g.at(r, j) += self.grad[r * h + j];
  });
}

Var dropout(const Var &x, double p, bool train, Rng &rng) {
  if (p < 0.0 || p >= 1.0) throw Error("dropout probability must be in [0,1)");
  if (!train || p == 0.0) return x;
  const double keep_scale = 1.0 / (1.0 - p);
  Tensor mask(x->shape());
  for (std::size_t i = 0; i < mask.size(); ++i) mask[i] = rng.bernoulli(p) ? 0.0 : keep_scale;
  return mul(x, constant(std::move(mask)));
}

}  // namespace kbqa::nn
