// Copyright 2026 The PRISM Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "prism/linalg.h"

#include <random>
#include <span>
#include <type_traits>
#include <vector>

#include <gmock/gmock.h>
#include <gtest/gtest.h>

namespace {

using ::prism::AddMacs;
using ::prism::MacCountScope;
using ::prism::Matrix;
using ::testing::ElementsAre;

// gmock container matchers need const_iterator, which std::span lacks.
template <typename T>
std::vector<std::remove_const_t<T>> Vec(std::span<T> s) {
  return {s.begin(), s.end()};
}

Matrix Make2x3() {
  Matrix m(2, 3);
  double v = 1.0;
  for (double& x : m.data()) x = v++;
  return m;
}

TEST(MatrixTest, IdentityAndSelect) {
  const Matrix id = Matrix::Identity(3);
  EXPECT_EQ(id(0, 0), 1.0);
  EXPECT_EQ(id(0, 1), 0.0);
  EXPECT_EQ(id(2, 2), 1.0);

  const Matrix m = Make2x3();
  const std::vector<std::size_t> cols{2, 0};
  const Matrix picked = m.SelectColumns(cols);
  EXPECT_EQ(picked.rows(), 2u);
  EXPECT_THAT(Vec(picked.data()), ElementsAre(3, 1, 6, 4));
  const std::vector<std::size_t> rows{1};
  EXPECT_THAT(Vec(m.SelectRows(rows).data()), ElementsAre(4, 5, 6));
}

TEST(KernelTest, DotAndMatVec) {
  const std::vector<double> a{1, 2, 3};
  const std::vector<double> b{4, -5, 6};
  EXPECT_EQ(prism::Dot(a, b), 12.0);

  std::vector<double> out(2);
  prism::MatVec(Make2x3(), a, out);
  EXPECT_THAT(out, ElementsAre(14, 32));

  std::vector<double> acc{1, 1, 1};
  prism::MatTVecAccumulate(Make2x3(), std::vector<double>{1, -1}, acc);
  EXPECT_THAT(acc, ElementsAre(-2, -2, -2));
}

TEST(KernelTest, DecayAndOuter) {
  std::vector<double> state{2, 4};
  prism::DecayAccumulate(std::vector<double>{0.5, 0.25}, state,
                         std::vector<double>{1, 1});
  EXPECT_THAT(state, ElementsAre(2, 2));

  Matrix acc(2, 2, 1.0);
  prism::OuterAccumulate(std::vector<double>{1, 2}, std::vector<double>{3, 4},
                         acc);
  EXPECT_THAT(Vec(acc.data()), ElementsAre(4, 5, 7, 9));
}

TEST(FillUniformTest, BoundedAndSeeded) {
  std::mt19937_64 r1(7), r2(7);
  std::vector<double> a(500), b(500);
  prism::FillUniform(a, 0.1, r1);
  prism::FillUniform(b, 0.1, r2);
  EXPECT_EQ(a, b);
  for (double x : a) {
    EXPECT_GE(x, -0.1);
    EXPECT_LE(x, 0.1);
  }
}

TEST(MacCountScopeTest, CountsKernelsAndNests) {
  const std::vector<double> x{1, 2, 3};
  std::vector<double> out(2);
  MacCountScope outer;
  prism::Dot(x, x);
  {
    MacCountScope inner;
    prism::MatVec(Make2x3(), x, out);
    EXPECT_EQ(inner.count(), 6u);
  }
  AddMacs(10);
  EXPECT_EQ(outer.count(), 3u + 6u + 10u);
}

TEST(MacCountScopeTest, NoScopeIsHarmless) {
  AddMacs(5);
  MacCountScope scope;
  EXPECT_EQ(scope.count(), 0u);
}

}  // namespace
