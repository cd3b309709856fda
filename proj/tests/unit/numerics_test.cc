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

#include "prism/numerics.h"

#include <cmath>
#include <vector>

#include <gtest/gtest.h>

#include "prism/errors.h"

namespace {

TEST(FiniteDiffTest, SquareAtThree) {
  const std::vector<double> x{3.0};
  const auto g = prism::FiniteDiff(
      [](std::span<const double> p) { return p[0] * p[0]; }, x, 1e-5);
  EXPECT_NEAR(g[0], 6.0, 1e-9);
}

TEST(FiniteDiffTest, ErrorShrinksQuadratically) {
  const std::vector<double> x{0.7};
  auto cubic = [](std::span<const double> p) { return p[0] * p[0] * p[0]; };
  const double exact = 3 * 0.7 * 0.7;
  const double e1 = std::abs(prism::FiniteDiff(cubic, x, 1e-2)[0] - exact);
  const double e2 = std::abs(prism::FiniteDiff(cubic, x, 5e-3)[0] - exact);
  // Central difference on x^3 has error exactly h^2.
  EXPECT_NEAR(e1, 1e-4, 1e-9);
  EXPECT_NEAR(e1 / e2, 4.0, 1e-3);
}

TEST(FiniteDiffTest, MultivariateAndBadStep) {
  const std::vector<double> x{1.0, -2.0};
  const auto g = prism::FiniteDiff(
      [](std::span<const double> p) { return p[0] * p[1] + p[1]; }, x, 1e-6);
  EXPECT_NEAR(g[0], -2.0, 1e-9);
  EXPECT_NEAR(g[1], 2.0, 1e-9);
  EXPECT_THROW(prism::FiniteDiff([](std::span<const double>) { return 0.0; }, x, 0.0),
               prism::ParameterError);
}

TEST(RelativeErrorTest, Floors) {
  EXPECT_EQ(prism::RelativeError(0.0, 0.0), 0.0);
  EXPECT_NEAR(prism::RelativeError(1.0, 1.1), 0.1 / 1.1, 1e-15);
  const auto report = prism::CompareGradients(std::vector<double>{1, 2},
                                              std::vector<double>{1, 2.2}, 1e-3);
  EXPECT_EQ(report.compared, 2u);
  EXPECT_NEAR(report.max_relative_error, 0.2 / 2.2, 1e-15);
  EXPECT_THROW(prism::CompareGradients(std::vector<double>{1},
                                       std::vector<double>{}, 1e-3),
               prism::ShapeError);
}

TEST(PairedDeviationTest, Examples) {
  const auto d = prism::PairedDeviationOf(std::vector<double>{1, 1},
                                          std::vector<double>{2, 3});
  EXPECT_DOUBLE_EQ(d.mean_difference, -1.5);
  EXPECT_DOUBLE_EQ(d.win_fraction, 1.0);
  EXPECT_EQ(d.count, 2u);

  const std::vector<double> same{0.3, 0.1, 0.9};
  const auto tie = prism::PairedDeviationOf(same, same);
  EXPECT_EQ(tie.mean_difference, 0.0);
  EXPECT_EQ(tie.win_fraction, 0.0);

  EXPECT_THROW(prism::PairedDeviationOf(std::vector<double>{},
                                        std::vector<double>{}),
               prism::ShapeError);
}

TEST(LogLogSlopeTest, RecoversPowerLaw) {
  std::vector<double> x, y;
  for (double v = 1; v <= 1024; v *= 2) {
    x.push_back(v);
    y.push_back(3.0 * std::pow(v, 1.5));
  }
  EXPECT_NEAR(prism::LogLogSlope(x, y), 1.5, 1e-12);
  EXPECT_THROW(prism::LogLogSlope(std::vector<double>{1}, std::vector<double>{1}),
               prism::ShapeError);
}

}  // namespace
