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

#include "prism/ssm.h"

#include <cmath>
#include <random>
#include <span>
#include <type_traits>
#include <vector>

#include <gmock/gmock.h>
#include <gtest/gtest.h>

#include "prism/errors.h"
#include "prism/numerics.h"

namespace {

using ::prism::Matrix;
using ::prism::Seed;
using ::prism::SsmForward;
using ::prism::SsmParams;
using ::prism::TokenSequence;

// gmock container matchers need const_iterator, which std::span lacks.
template <typename T>
std::vector<std::remove_const_t<T>> Vec(std::span<T> s) {
  return {s.begin(), s.end()};
}

TokenSequence RandomSequence(std::size_t t, std::size_t m, std::uint64_t seed) {
  TokenSequence seq(t, m);
  std::mt19937_64 rng(seed);
  prism::FillUniform(seq.tokens.data(), 1.0, rng);
  return seq;
}

SsmParams IdentityMix(std::size_t m, std::size_t d) {
  SsmParams p = SsmParams::Zeros(m, d);
  p.mix = Matrix::Identity(d);
  return p;
}

TEST(ScalarFunctionsTest, SoftplusSigmoid) {
  EXPECT_DOUBLE_EQ(prism::Softplus(0.0), std::log(2.0));
  EXPECT_DOUBLE_EQ(prism::Sigmoid(0.0), 0.5);
  EXPECT_NEAR(prism::Softplus(800.0), 800.0, 1e-12);
  EXPECT_GE(prism::Softplus(-800.0), 0.0);
  EXPECT_NEAR(prism::Sigmoid(-800.0), 0.0, 1e-300);
  EXPECT_TRUE(std::isfinite(prism::Sigmoid(800.0)));
}

TEST(ProjectParamsTest, ZeroWeightsGiveHalfDecayAndGate) {
  const SsmParams p = SsmParams::Zeros(3, 2);
  const std::vector<double> x{0.3, -2.0, 5.0};
  const prism::StepParams step = prism::ProjectParams(x, p);
  EXPECT_THAT(step.decay, ::testing::Each(::testing::DoubleNear(0.5, 1e-15)));
  EXPECT_EQ(step.gate, 0.5);
  EXPECT_THAT(step.drive, ::testing::Each(0.0));
  EXPECT_THROW(prism::ProjectParams(std::vector<double>{1.0}, p),
               prism::ShapeError);
}

TEST(ProjectParamsTest, LargeBiasShutsMemory) {
  SsmParams p = SsmParams::Zeros(1, 1);
  p.decay_bias[0] = 30.0;
  EXPECT_LT(prism::ProjectParams(std::vector<double>{0.0}, p).decay[0], 1e-13);
}

TEST(ProjectParamsTest, DecayStaysInUnitInterval) {
  // Pre-activations stay within about +-15; far beyond that exp(-softplus)
  // rounds to exactly 0 or 1.
  SsmParams p = SsmParams::Random(4, 3, Seed{1}, 1.0);
  std::mt19937_64 rng(2);
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<double> x(4);
    prism::FillUniform(x, 3.0, rng);
    for (double a : prism::ProjectParams(x, p).decay) {
      EXPECT_GT(a, 0.0);
      EXPECT_LT(a, 1.0);
    }
  }
}

TEST(SsmParamsTest, RandomInit) {
  const SsmParams p = SsmParams::Random(4, 3, Seed{9});
  EXPECT_EQ(p.ParameterCount(), 3u * 4 + 3 + 3 * 4 + 3 + 3 * 3 + 4 + 1);
  EXPECT_THAT(p.decay_bias, ::testing::Each(1.0));
  EXPECT_THAT(p.input_bias, ::testing::Each(0.0));
  EXPECT_EQ(p.gate_bias, 0.0);
  for (double w : p.decay_weight.data()) EXPECT_LE(std::abs(w), 0.1);
  EXPECT_EQ(p, SsmParams::Random(4, 3, Seed{9}));
  EXPECT_NE(p, SsmParams::Random(4, 3, Seed{10}));
  EXPECT_THROW(SsmParams::Zeros(0, 2), prism::ShapeError);
}

TEST(SsmParamsTest, FlattenRoundTrip) {
  const SsmParams p = SsmParams::Random(3, 2, Seed{4});
  SsmParams q = SsmParams::Zeros(3, 2);
  q.Unflatten(p.Flatten());
  EXPECT_EQ(p, q);
  EXPECT_THROW(q.Unflatten(std::vector<double>(3)), prism::ShapeError);

  SsmParams twice = p;
  twice.Accumulate(p);
  const auto a = p.Flatten();
  const auto b = twice.Flatten();
  for (std::size_t i = 0; i < a.size(); ++i) EXPECT_EQ(b[i], 2 * a[i]);
}

TEST(SsmForwardTest, UnitDecayIsPrefixSum) {
  // b_A = -40 makes A = exp(-softplus(-40)) = 1 to double precision.
  SsmParams p = IdentityMix(1, 1);
  p.decay_bias[0] = -40.0;
  p.input_weight(0, 0) = 1.0;
  p.gate_bias = 40.0;
  TokenSequence seq(4, 1);
  for (std::size_t k = 0; k < 4; ++k) seq.tokens(k, 0) = static_cast<double>(k + 1);
  const auto run = SsmForward(seq, p);
  EXPECT_THAT(Vec(run.outputs.data()), ::testing::ElementsAre(
                                      ::testing::DoubleNear(1, 1e-12),
                                      ::testing::DoubleNear(3, 1e-12),
                                      ::testing::DoubleNear(6, 1e-12),
                                      ::testing::DoubleNear(10, 1e-12)));
}

TEST(SsmForwardTest, HalfDecayClosedForm) {
  // A = 0.5, g = 0.5, Bx = 1: h_k = 2 - 2^{1-k}.
  SsmParams p = IdentityMix(2, 1);
  p.input_bias[0] = 1.0;
  const auto run = SsmForward(TokenSequence(6, 2), p);
  for (std::size_t k = 0; k < 6; ++k) {
    const double h = 2.0 - std::pow(2.0, -static_cast<double>(k));
    EXPECT_NEAR(run.states(k, 0), h, 1e-15);
    EXPECT_NEAR(run.outputs(k, 0), 0.5 * h, 1e-15);
  }
}

TEST(SsmForwardTest, MaskedTokensOnlyDecay) {
  SsmParams p = IdentityMix(1, 1);
  p.input_bias[0] = 1.0;
  TokenSequence seq(3, 1);
  seq.mask[1] = 0;
  const auto run = SsmForward(seq, p);
  EXPECT_NEAR(run.states(0, 0), 1.0, 1e-15);
  EXPECT_NEAR(run.states(1, 0), 0.5, 1e-15);
  EXPECT_NEAR(run.states(2, 0), 1.25, 1e-15);
}

TEST(SsmForwardTest, EmptySequence) {
  const SsmParams p = SsmParams::Random(3, 2, Seed{1});
  const auto run = SsmForward(TokenSequence(0, 3), p);
  EXPECT_EQ(run.length(), 0u);
  EXPECT_THAT(run.final_state(), ::testing::ElementsAre(0, 0));
  EXPECT_THAT(prism::RingDescriptor(run), ::testing::ElementsAre(0, 0));
}

TEST(SsmForwardTest, WidthMismatchThrows) {
  EXPECT_THROW(SsmForward(TokenSequence(2, 3), SsmParams::Zeros(2, 2)),
               prism::ShapeError);
}

TEST(SsmForwardTest, StateBoundedByDecayGeometry) {
  // |h_k| <= B_max / (1 - A_max) whenever every decay is at most A_max.
  SsmParams p = SsmParams::Random(3, 4, Seed{3}, 0.5);
  const auto seq = RandomSequence(400, 3, 4);
  const auto run = SsmForward(seq, p);
  double a_max = 0.0, b_max = 0.0;
  for (double a : run.decay.data()) a_max = std::max(a_max, a);
  for (double b : run.drive.data()) b_max = std::max(b_max, std::abs(b));
  const double bound = b_max / (1.0 - a_max);
  for (double h : run.states.data()) EXPECT_LE(std::abs(h), bound * (1 + 1e-12));
}

TEST(SsmForwardTest, MemorylessMatchesPerTokenOutput) {
  SsmParams p = SsmParams::Random(3, 2, Seed{5}, 1.0);
  prism::MakeMemoryless(p);
  const auto seq = RandomSequence(10, 3, 6);
  const auto run = SsmForward(seq, p);
  for (std::size_t k = 0; k < 10; ++k) {
    TokenSequence single(1, 3);
    for (std::size_t j = 0; j < 3; ++j) single.tokens(0, j) = seq.tokens(k, j);
    const auto one = SsmForward(single, p);
    for (std::size_t i = 0; i < 2; ++i) {
      EXPECT_NEAR(run.outputs(k, i), one.outputs(0, i), 1e-12);
    }
  }
}

// Unrolled sum over the convolution kernel, written independently of the
// library's own oracle.
Matrix ConvolutionForm(const TokenSequence& seq, const SsmParams& p) {
  const std::size_t t = seq.length(), m = p.token_width, d = p.state_width;
  Matrix a(t, d), b(t, d);
  std::vector<double> g(t);
  for (std::size_t k = 0; k < t; ++k) {
    double z = p.gate_bias;
    for (std::size_t j = 0; j < m; ++j) z += p.gate_weight[j] * seq.tokens(k, j);
    g[k] = 1.0 / (1.0 + std::exp(-z));
    for (std::size_t i = 0; i < d; ++i) {
      double za = p.decay_bias[i], zb = p.input_bias[i];
      for (std::size_t j = 0; j < m; ++j) {
        za += p.decay_weight(i, j) * seq.tokens(k, j);
        zb += p.input_weight(i, j) * seq.tokens(k, j);
      }
      a(k, i) = 1.0 / (1.0 + std::exp(za));  // exp(-softplus(z)) = sigmoid(-z)
      b(k, i) = seq.mask[k] ? zb : 0.0;
    }
  }
  Matrix y(t, d);
  for (std::size_t k = 0; k < t; ++k) {
    std::vector<double> h(d, 0.0);
    for (std::size_t i = 0; i < d; ++i) {
      double decay = 1.0;
      for (std::size_t j = k + 1; j-- > 0;) {
        h[i] += decay * b(j, i);
        decay *= a(j, i);
      }
    }
    for (std::size_t r = 0; r < d; ++r) {
      double acc = 0.0;
      for (std::size_t i = 0; i < d; ++i) acc += p.mix(r, i) * h[i];
      y(k, r) = g[k] * acc;
    }
  }
  return y;
}

TEST(SsmForwardTest, MatchesConvolutionForm) {
  for (std::uint64_t s = 0; s < 20; ++s) {
    const std::size_t m = 1 + s % 5, d = 1 + (s * 3) % 6, t = s * 3;
    SsmParams p = SsmParams::Random(m, d, Seed{s}, 1.0);
    auto seq = RandomSequence(t, m, 100 + s);
    for (std::size_t k = 0; k < t; k += 4) seq.mask[k] = 0;
    const auto run = SsmForward(seq, p);
    const Matrix expect = ConvolutionForm(seq, p);
    const Matrix oracle = prism::OracleSsm(seq, p);
    for (std::size_t i = 0; i < expect.size(); ++i) {
      EXPECT_NEAR(run.outputs.data()[i], expect.data()[i], 1e-12);
      EXPECT_NEAR(oracle.data()[i], expect.data()[i], 1e-12);
    }
  }
}

TEST(SsmBackwardTest, MatchesFiniteDifferences) {
  const std::size_t m = 3, d = 2, t = 7;
  const SsmParams p = SsmParams::Random(m, d, Seed{21}, 0.5);
  auto seq = RandomSequence(t, m, 22);
  seq.mask[3] = 0;
  Matrix w(t, d);
  std::mt19937_64 rng(23);
  prism::FillUniform(w.data(), 1.0, rng);
  auto loss = [&](const TokenSequence& s, const SsmParams& q) {
    const auto run = SsmForward(s, q);
    double total = 0.0;
    for (std::size_t i = 0; i < w.size(); ++i) total += w.data()[i] * run.outputs.data()[i];
    return total;
  };
  const auto grads = prism::SsmBackward(SsmForward(seq, p), p, w);

  const auto num_params = prism::FiniteDiff(
      [&](std::span<const double> flat) {
        SsmParams q = p;
        q.Unflatten(flat);
        return loss(seq, q);
      },
      p.Flatten(), 1e-6);
  const auto params_report =
      prism::CompareGradients(grads.params.Flatten(), num_params, 1e-6);
  EXPECT_LT(params_report.max_relative_error, 1e-6);

  const auto num_inputs = prism::FiniteDiff(
      [&](std::span<const double> flat) {
        TokenSequence s = seq;
        std::copy(flat.begin(), flat.end(), s.tokens.data().begin());
        return loss(s, p);
      },
      seq.tokens.data(), 1e-6);
  EXPECT_LT(prism::CompareGradients(grads.inputs.data(), num_inputs, 1e-6)
                .max_relative_error,
            1e-6);
}

TEST(SsmBackwardTest, PerturbationHookIsDetected) {
  const SsmParams p = SsmParams::Random(2, 2, Seed{1}, 0.5);
  const auto seq = RandomSequence(4, 2, 2);
  const auto run = SsmForward(seq, p);
  Matrix w(4, 2, 1.0);
  const auto clean = prism::SsmBackward(run, p, w);
  prism::SetGradientPerturbationForTesting(1e-3);
  const auto bent = prism::SsmBackward(run, p, w);
  prism::SetGradientPerturbationForTesting(0.0);
  EXPECT_NE(clean.params.input_weight, bent.params.input_weight);
  EXPECT_EQ(clean.params.decay_weight, bent.params.decay_weight);
}

TEST(SsmBackwardTest, ShapeChecks) {
  const SsmParams p = SsmParams::Zeros(2, 2);
  const auto run = SsmForward(TokenSequence(3, 2), p);
  EXPECT_THROW(prism::SsmBackward(run, p, Matrix(2, 2)), prism::ShapeError);
}

TEST(RingDescriptorTest, MeanOfOutputs) {
  SsmParams p = IdentityMix(1, 1);
  p.input_bias[0] = 1.0;
  const auto run = SsmForward(TokenSequence(2, 1), p);
  // outputs 0.5 * {1, 1.5}
  EXPECT_THAT(prism::RingDescriptor(run), ::testing::ElementsAre(0.625));
}

TEST(RadialForwardTest, RunsOverRows) {
  const SsmParams radial = SsmParams::Random(2, 3, Seed{8});
  Matrix z(4, 2, 0.25);
  const auto run = prism::RadialForward(z, radial);
  EXPECT_EQ(run.length(), 4u);
  EXPECT_EQ(run.outputs.cols(), 3u);
  EXPECT_THROW(prism::RadialForward(Matrix(4, 3), radial), prism::ShapeError);
}

}  // namespace
