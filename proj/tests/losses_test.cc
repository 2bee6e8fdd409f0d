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


#include <cmath>
#include <vector>

#include "doctest.h"
#include "gradcheck_suite.h"
#include "kbqa/errors.h"
#include "kbqa/nn/autograd.h"
#include "kbqa/nn/losses.h"

namespace kbqa {
namespace {

using nn::Tensor;

TEST_SUITE("losses") {
  TEST_CASE("binary cross-entropy hand values") {
    CHECK(nn::loss_binary_ce(0.999, 1) == doctest::Approx(-std::log(0.999)).epsilon(1e-12));
    CHECK(nn::loss_binary_ce(0.999, 1) < 0.0011);
    CHECK(std::abs(nn::loss_binary_ce(0.5, 0) - 0.69314718055994531) < 1e-9);
    CHECK(std::abs(nn::loss_binary_ce(1.0, 1)) < 1e-9);
    CHECK(std::abs(nn::loss_binary_ce(0.0, 0)) < 1e-9);
    // Clamped rather than infinite.
    CHECK(std::isfinite(nn::loss_binary_ce(0.0, 1)));
  }

  TEST_CASE("categorical cross-entropy hand values") {
    const Tensor one_hot = Tensor::matrix(2, 2, {1.0, 0.0, 0.0, 1.0});
    const int gold[] = {0, 1};
    CHECK(std::abs(nn::loss_categorical_ce(one_hot, gold)) < 1e-9);
    const Tensor p = Tensor::matrix(3, 2, {0.8, 0.2, 0.4, 0.6, 0.5, 0.5});
    const int g3[] = {0, 0, 1};
    const double want = -(std::log(0.8) + std::log(0.4) + std::log(0.5)) / 3.0;
    CHECK(std::abs(nn::loss_categorical_ce(p, g3) - want) < 1e-9);
    const int bad[] = {0, 2, 1};
    CHECK_THROWS(nn::loss_categorical_ce(p, bad));
  }

  TEST_CASE("hinge examples") {
    CHECK(nn::loss_hinge_qas(0.75, 0.25, 0.5) == 0.0);
    CHECK(nn::loss_hinge_qas(0.9, 0.2, 0.5) == 0.0);
    CHECK(nn::loss_hinge_qas(0.3, 0.2, 0.5) == doctest::Approx(0.4).epsilon(1e-12));
    CHECK(nn::loss_hinge_qat(0.9, 0.2, 0.9, 0.2, 0.5) == 0.0);
    // Entity channel short by 0.1.
    CHECK(nn::loss_hinge_qat(0.6, 0.2, 0.9, 0.2, 0.5) == doctest::Approx(0.1).epsilon(1e-12));
    // Type channel short by 0.2.
    CHECK(nn::loss_hinge_qat_type(0.9, 0.2, 0.9, 0.2, 0.5, 0.2, 0.5) ==
          doctest::Approx(0.2).epsilon(1e-12));
    CHECK(nn::loss_hinge_qas(0.4, 0.4, 0.0) == 0.0);
  }

  TEST_CASE("hinge gradient sign structure") {
    const nn::Var pos = nn::parameter(Tensor::scalar(0.3));
    const nn::Var neg = nn::parameter(Tensor::scalar(0.2));
    nn::backward(nn::hinge(pos, neg, 0.5));
    CHECK(pos->grad[0] == -1.0);
    CHECK(neg->grad[0] == 1.0);
    const nn::Var p2 = nn::parameter(Tensor::scalar(0.9));
    const nn::Var n2 = nn::parameter(Tensor::scalar(0.1));
    nn::backward(nn::hinge(p2, n2, 0.5));
    CHECK((p2->grad.size() == 0 || p2->grad[0] == 0.0));
    CHECK((n2->grad.size() == 0 || n2->grad[0] == 0.0));
  }

  TEST_CASE("ranking losses vanish exactly when margins hold") {
    const std::string why = testing::check_hinge_semantics(77, 1000);
    CHECK_MESSAGE(why.empty(), why);
  }
}

}  // namespace
}  // namespace kbqa
