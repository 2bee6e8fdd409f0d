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


#include "gradcheck_suite.h"

#include <cmath>
#include <algorithm>
#include <functional>
#include <string>

#include "kbqa/nn/autograd.h"
#include "kbqa/nn/gradcheck.h"
#include "kbqa/nn/layers.h"
#include "kbqa/nn/losses.h"
#include "kbqa/rng.h"

namespace kbqa::testing {
namespace {

using nn::Tensor;
using nn::Var;

Tensor Random(nn::Shape shape, Rng &rng, double lo = -1.0, double hi = 1.0) {
  Tensor t(std::move(shape));
  for (std::size_t i = 0; i < t.size(); ++i) t[i] = rng.uniform(lo, hi);
  return t;
}

// Moves entries away from a kink at zero.
Tensor OffKink(Tensor t) {
  for (std::size_t i = 0; i < t.size(); ++i) {
    if (std::abs(t[i]) < 0.1) t[i] = t[i] < 0 ? -0.1 - std::abs(t[i]) : 0.1 + t[i];
  }
  return t;
}

}  // namespace

std::vector<OpCheck> run_gradchecks(std::uint64_t seed) {
  Rng rng(seed);
  std::vector<OpCheck> out;
  auto check = [&](const std::string &name, std::vector<Var> params,
                   const std::function<Var()> &body) {
    Rng weights(seed * 7919 + out.size());
    const Var probe = body();
    const Tensor w = probe->size() == 1 ? Tensor::scalar(1.0) : Random(probe->shape(), weights, 0.5, 1.5);
    auto f = [&]() {
      const Var o = body();
      return o->size() == 1 ? o : nn::sum(nn::mul(o, nn::constant(w)));
    };
    const auto r = nn::finite_diff_check(f, params);
    out.push_back({name, r.max_rel_error, r.checked});
  };

  const Var a = nn::parameter(Random({4}, rng));
  const Var b = nn::parameter(Random({4}, rng));
  const Var m = nn::parameter(Random({3, 4}, rng));
  const Var m2 = nn::parameter(Random({4, 2}, rng));

  check("add", {a, b}, [&] { return nn::add(a, b); });
  check("sub", {a, b}, [&] { return nn::sub(a, b); });
  check("mul", {a, b}, [&] { return nn::mul(a, b); });
  check("scale", {a}, [&] { return nn::scale(a, -1.7); });
  check("add_scalar", {a}, [&] { return nn::add_scalar(a, 0.3); });
  check("one_minus", {a}, [&] { return nn::one_minus(a); });
  check("sigmoid", {a}, [&] { return nn::sigmoid(a); });
  check("tanh", {a}, [&] { return nn::tanh(a); });
  const Var k = nn::parameter(OffKink(Random({6}, rng)));
  check("relu", {k}, [&] { return nn::relu(k); });
  const Var pos = nn::parameter(Random({4}, rng, 0.5, 2.0));
  check("log", {pos}, [&] { return nn::log(pos); });
  check("matmul", {m, m2}, [&] { return nn::matmul(m, m2); });
  check("matvec", {m, a}, [&] { return nn::matvec(m, a); });
  check("transpose", {m}, [&] { return nn::transpose(m); });
  check("softmax", {a}, [&] { return nn::softmax(a); });
  check("softmax_rows", {m}, [&] { return nn::softmax(m); });
  check("concat", {a, b}, [&] {
    const Var parts[] = {a, b, a};
    return nn::concat(parts);
  });
  check("slice", {a}, [&] { return nn::slice(a, 1, 2); });
  check("stack_rows", {a, b}, [&] {
    const Var rows[] = {a, b};
    return nn::stack_rows(rows, 4);
  });
  check("row", {m}, [&] { return nn::row(m, 1); });
  check("sum", {m}, [&] { return nn::sum(m); });
  check("dot", {a, b}, [&] { return nn::dot(a, b); });
  check("cosine", {a, b}, [&] { return nn::cosine(a, b); });
  check("flatten_padded", {m}, [&] { return nn::flatten_padded(m, 5); });
  check("flatten_truncated", {m}, [&] { return nn::flatten_padded(m, 2); });
  check("dropout", {a}, [&] {
    Rng mask(seed);
    return nn::dropout(a, 0.3, true, mask);
  });

  const Var probs_logits = nn::parameter(Random({3, 2}, rng));
  const int gold[] = {0, 1, 1};
  check("categorical_ce", {probs_logits},
        [&] { return nn::categorical_ce(nn::softmax(probs_logits), gold); });
  const Var logit = nn::parameter(Random({1}, rng));
  check("binary_ce_pos", {logit}, [&] { return nn::binary_ce(nn::sigmoid(logit), 1); });
  check("binary_ce_neg", {logit}, [&] { return nn::binary_ce(nn::sigmoid(logit), 0); });

  // Active and inactive hinge, both away from the kink.
  const Var sp = nn::parameter(Tensor::scalar(0.2));
  const Var sn = nn::parameter(Tensor::scalar(0.1 + rng.uniform(0.0, 0.3)));
  check("hinge_active", {sp, sn}, [&] { return nn::hinge(sp, sn, 0.5); });
  const Var sp2 = nn::parameter(Tensor::scalar(0.9 + rng.uniform(0.0, 0.1)));
  const Var sn2 = nn::parameter(Tensor::scalar(0.1));
  check("hinge_inactive", {sp2, sn2}, [&] { return nn::hinge(sp2, sn2, 0.5); });

  nn::ParamStore store;
  Rng init(seed + 1);
  const nn::DenseParams dense = nn::make_dense(store, "dense", 4, 5, nn::Activation::kNone, init);
  const Var x4 = nn::parameter(Random({4}, rng));
  dense.weight->value = Random({5, 4}, rng);
  check("dense", {dense.weight, dense.bias, x4}, [&] { return dense.forward(x4); });
  const nn::DenseParams sig = nn::make_dense(store, "sig", 4, 3, nn::Activation::kSigmoid, init);
  check("dense_sigmoid", {sig.weight, sig.bias, x4}, [&] { return sig.forward(x4); });
  const nn::DenseParams rel = nn::make_dense(store, "rel", 4, 3, nn::Activation::kRelu, init);
  // Small weights keep every pre-activation on the side its bias picks.
  rel.weight->value = Random({3, 4}, rng, -0.1, 0.1);
  rel.bias->value = Tensor::vector({0.7, -0.6, 0.9});
  check("dense_relu", {rel.weight, x4}, [&] { return rel.forward(x4); });

  const nn::RecurrentParams gru = nn::make_recurrent(store, "gru", nn::CellKind::kGru, 4, 3, init);
  const nn::RecurrentParams lstm = nn::make_recurrent(store, "lstm", nn::CellKind::kLstm, 4, 3, init);
  const nn::RecurrentParams lstm_b =
      nn::make_recurrent(store, "lstm_b", nn::CellKind::kLstm, 4, 3, init);
  for (auto *p : {&gru, &lstm, &lstm_b}) {
    for (const auto &g : p->gates) g.b->value = Random({3}, rng, -0.5, 0.5);
  }
  const Var seq = nn::parameter(Random({3, 4}, rng));
  auto gate_params = [](const nn::RecurrentParams &p) {
    std::vector<Var> v;
    for (const auto &g : p.gates) v.insert(v.end(), {g.w, g.u, g.b});
    return v;
  };
  {
    auto ps = gate_params(gru);
    ps.push_back(seq);
    check("gru", ps, [&] { return nn::recurrent_forward(gru, seq).states; });
    check("gru_backward", ps,
          [&] { return nn::recurrent_forward(gru, seq, nn::Direction::kBackward).last; });
  }
  {
    auto ps = gate_params(lstm);
    ps.push_back(seq);
    check("lstm", ps, [&] { return nn::recurrent_forward(lstm, seq).states; });
  }
  {
    auto ps = gate_params(lstm);
    const auto pb = gate_params(lstm_b);
    ps.insert(ps.end(), pb.begin(), pb.end());
    ps.push_back(seq);
    check("bidirectional", ps, [&] {
      std::vector<Var> rows;
      for (std::size_t t = 0; t < 3; ++t) rows.push_back(nn::row(seq, t));
      return nn::bidirectional_encode(lstm, lstm_b, rows).states;
    });
  }
  const Var states = nn::parameter(Random({4, 3}, rng));
  check("self_attention", {states}, [&] { return nn::self_attention(states); });

  nn::Vocab vocab(std::vector<std::string>{nn::Vocab::kOovToken, "a", "b"});
  const nn::EmbeddingTable table = nn::make_embedding(store, "emb", vocab, 3, init);
  check("embedding", {table.vectors}, [&] {
    const std::string toks[] = {"a", "zzz", "a", "b"};
    return table.embed(toks);
  });
  return out;
}

std::string check_hinge_semantics(std::uint64_t seed, int n) {
  Rng rng(seed);
  const double gammas[] = {0.25, 0.5, 1.0};
  for (int i = 0; i < n; ++i) {
    const double gamma = gammas[rng.index(3)];
    double s[6];
    for (double &x : s) {
      x = i % 2 == 0 ? static_cast<double>(static_cast<int>(rng.index(129)) - 64) / 64.0
                     : rng.uniform(-1.0, 1.0);
    }
    // Force some exact-boundary channels.
    if (i % 4 == 0) s[0] = s[1] + gamma;
    const bool ok_s = s[0] - s[1] >= gamma, ok_p = s[2] - s[3] >= gamma,
               ok_t = s[4] - s[5] >= gamma;
    const double qas = nn::loss_hinge_qas(s[0], s[1], gamma);
    const double qat = nn::loss_hinge_qat(s[0], s[1], s[2], s[3], gamma);
    const double qtt = nn::loss_hinge_qat_type(s[0], s[1], s[2], s[3], s[4], s[5], gamma);
    const std::string at = "tuple " + std::to_string(i) + ": ";
    if (qas < 0 || qat < 0 || qtt < 0) return at + "negative loss";
    if ((qas == 0.0) != ok_s) return at + "qas zero set wrong";
    if ((qat == 0.0) != (ok_s && ok_p)) return at + "qat zero set wrong";
    if ((qtt == 0.0) != (ok_s && ok_p && ok_t)) return at + "qat_type zero set wrong";
    const double expect = std::max(0.0, s[1] + gamma - s[0]);
    if (std::abs(qas - expect) > 1e-12) return at + "qas value";
    const Var v = nn::hinge(nn::constant(Tensor::scalar(s[0])), nn::constant(Tensor::scalar(s[1])),
                            gamma);
    if (nn::item(v) != qas) return at + "differentiable hinge disagrees";
  }
  return "";
}

}  // namespace kbqa::testing
