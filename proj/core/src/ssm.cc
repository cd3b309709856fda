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

#include <atomic>
#include <cmath>
#include <random>
#include <string>

#include "prism/errors.h"

namespace prism {
namespace {

std::atomic<double> gradient_perturbation{0.0};

void CheckShape(const SsmParams& p) {
  const std::size_t m = p.token_width, d = p.state_width;
  if (p.decay_weight.rows() != d || p.decay_weight.cols() != m ||
      p.input_weight.rows() != d || p.input_weight.cols() != m ||
      p.mix.rows() != d || p.mix.cols() != d || p.decay_bias.size() != d ||
      p.input_bias.size() != d || p.gate_weight.size() != m) {
    throw ShapeError("SsmParams: inconsistent weight shapes");
  }
}

// Writes A and Bx for token x and returns the gate.
double ProjectInto(std::span<const double> x, const SsmParams& p,
                   std::span<double> decay, std::span<double> drive) {
  MatVec(p.decay_weight, x, decay);
  for (std::size_t i = 0; i < decay.size(); ++i) {
    decay[i] = std::exp(-Softplus(decay[i] + p.decay_bias[i]));
  }
  MatVec(p.input_weight, x, drive);
  for (std::size_t i = 0; i < drive.size(); ++i) drive[i] += p.input_bias[i];
  return Sigmoid(Dot(p.gate_weight, x) + p.gate_bias);
}

template <typename F>
void ForEachBlock(SsmParams& p, F&& f) {
  f(p.decay_weight.data());
  f(std::span<double>(p.decay_bias));
  f(p.input_weight.data());
  f(std::span<double>(p.input_bias));
  f(p.mix.data());
  f(std::span<double>(p.gate_weight));
  f(std::span<double>(&p.gate_bias, 1));
}

}  // namespace

double Softplus(double x) {
  return std::max(x, 0.0) + std::log1p(std::exp(-std::abs(x)));
}

double Sigmoid(double x) {
  if (x >= 0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

void SetGradientPerturbationForTesting(double relative) {
  gradient_perturbation.store(relative);
}

SsmParams SsmParams::Zeros(std::size_t token_width, std::size_t state_width) {
  if (token_width == 0 || state_width == 0) {
    throw ShapeError("SSM widths must be positive");
  }
  SsmParams p;
  p.token_width = token_width;
  p.state_width = state_width;
  p.decay_weight = Matrix(state_width, token_width);
  p.decay_bias.assign(state_width, 0.0);
  p.input_weight = Matrix(state_width, token_width);
  p.input_bias.assign(state_width, 0.0);
  p.mix = Matrix(state_width, state_width);
  p.gate_weight.assign(token_width, 0.0);
  p.gate_bias = 0.0;
  return p;
}

SsmParams SsmParams::Random(std::size_t token_width, std::size_t state_width,
                            Seed seed, double weight_bound) {
  SsmParams p = Zeros(token_width, state_width);
  std::mt19937_64 rng(seed.value);
  FillUniform(p.decay_weight.data(), weight_bound, rng);
  FillUniform(p.input_weight.data(), weight_bound, rng);
  FillUniform(p.mix.data(), weight_bound, rng);
  FillUniform(p.gate_weight, weight_bound, rng);
  p.decay_bias.assign(state_width, 1.0);
  return p;
}

std::size_t SsmParams::ParameterCount() const {
  return 2 * state_width * token_width + 2 * state_width +
         state_width * state_width + token_width + 1;
}

std::vector<double> SsmParams::Flatten() const {
  std::vector<double> flat;
  flat.reserve(ParameterCount());
  ForEachBlock(const_cast<SsmParams&>(*this), [&](std::span<double> block) {
    flat.insert(flat.end(), block.begin(), block.end());
  });
  return flat;
}

void SsmParams::Unflatten(std::span<const double> flat) {
  if (flat.size() != ParameterCount()) {
    throw ShapeError("SsmParams::Unflatten: expected " +
                     std::to_string(ParameterCount()) + " values");
  }
  std::size_t offset = 0;
  ForEachBlock(*this, [&](std::span<double> block) {
    std::copy_n(flat.begin() + offset, block.size(), block.begin());
    offset += block.size();
  });
}

void SsmParams::Accumulate(const SsmParams& other) {
  const auto flat = other.Flatten();
  std::size_t offset = 0;
  ForEachBlock(*this, [&](std::span<double> block) {
    for (double& v : block) v += flat[offset++];
  });
}

void MakeMemoryless(SsmParams& params) {
  params.decay_weight.Fill(0.0);
  // exp(-softplus(40)) ~ 4e-18.
  params.decay_bias.assign(params.state_width, 40.0);
}

StepParams ProjectParams(std::span<const double> x, const SsmParams& params) {
  CheckShape(params);
  if (x.size() != params.token_width) {
    throw ShapeError("ProjectParams: token width mismatch");
  }
  StepParams step;
  step.decay.resize(params.state_width);
  step.drive.resize(params.state_width);
  step.gate = ProjectInto(x, params, step.decay, step.drive);
  return step;
}

std::vector<double> SsmRun::final_state() const {
  if (length() == 0) return std::vector<double>(state_width, 0.0);
  auto last = states.row(length() - 1);
  return {last.begin(), last.end()};
}

TokenSequence SsmRun::OutputSequence() const {
  TokenSequence seq;
  seq.tokens = outputs;
  seq.mask = mask;
  return seq;
}

SsmRun SsmForward(const TokenSequence& seq, const SsmParams& params) {
  CheckShape(params);
  if (seq.width() != params.token_width) {
    throw ShapeError("SsmForward: token width " + std::to_string(seq.width()) +
                     " != " + std::to_string(params.token_width));
  }
  if (seq.mask.size() != seq.length()) {
    throw ShapeError("SsmForward: mask length mismatch");
  }
  const std::size_t t_len = seq.length();
  const std::size_t d = params.state_width;

  SsmRun run;
  run.state_width = d;
  run.inputs = seq.tokens;
  run.mask = seq.mask;
  run.decay = Matrix(t_len, d);
  run.drive = Matrix(t_len, d);
  run.gate.resize(t_len);
  run.states = Matrix(t_len, d);
  run.outputs = Matrix(t_len, d);

  std::vector<double> h(d, 0.0);
  const std::vector<double> no_input(d, 0.0);
  for (std::size_t k = 0; k < t_len; ++k) {
    auto x = run.inputs.row(k);
    auto decay = run.decay.row(k);
    auto drive = run.drive.row(k);
    const double g = ProjectInto(x, params, decay, drive);
    run.gate[k] = g;
    DecayAccumulate(decay, h,
                    run.mask[k] != 0 ? std::span<const double>(drive)
                                     : std::span<const double>(no_input));
    std::copy(h.begin(), h.end(), run.states.row(k).begin());
    auto y = run.outputs.row(k);
    MatVec(params.mix, h, y);
    for (double& v : y) v *= g;
  }
  return run;
}

SsmGradients SsmBackward(const SsmRun& run, const SsmParams& params,
                         const Matrix& output_grad) {
  CheckShape(params);
  const std::size_t t_len = run.length();
  const std::size_t m = params.token_width;
  const std::size_t d = params.state_width;
  if (run.inputs.cols() != m || run.state_width != d) {
    throw ShapeError("SsmBackward: run does not match params");
  }
  if (output_grad.rows() != t_len || output_grad.cols() != d) {
    throw ShapeError("SsmBackward: output gradient must be T x d");
  }

  SsmGradients grads;
  grads.inputs = Matrix(t_len, m);
  grads.params = SsmParams::Zeros(m, d);
  SsmParams& gp = grads.params;

  std::vector<double> carry(d, 0.0);  // A_{k+1} (.) dL/dh_{k+1}
  std::vector<double> q(d), dq(d), dh(d), da(d), dbx(d), pre(d);
  const std::vector<double> zeros(d, 0.0);

  for (std::size_t k = t_len; k-- > 0;) {
    auto x = run.inputs.row(k);
    auto h = run.states.row(k);
    auto h_prev = k > 0 ? run.states.row(k - 1) : std::span<const double>(zeros);
    auto decay = run.decay.row(k);
    auto dy = output_grad.row(k);
    const double g = run.gate[k];

    MatVec(params.mix, h, q);
    double dg = 0.0;
    for (std::size_t i = 0; i < d; ++i) {
      dg += dy[i] * q[i];
      dq[i] = g * dy[i];
    }
    OuterAccumulate(dq, h, gp.mix);

    dh = carry;
    MatTVecAccumulate(params.mix, dq, dh);

    MatVec(params.decay_weight, x, pre);
    for (std::size_t i = 0; i < d; ++i) {
      const double a = pre[i] + params.decay_bias[i];
      // d/da exp(-softplus(a)) = -exp(-softplus(a)) * sigmoid(a)
      da[i] = dh[i] * h_prev[i] * (-decay[i] * Sigmoid(a));
      dbx[i] = run.mask[k] != 0 ? dh[i] : 0.0;
      carry[i] = decay[i] * dh[i];
    }
    const double dgate_pre = dg * g * (1.0 - g);

    OuterAccumulate(da, x, gp.decay_weight);
    OuterAccumulate(dbx, x, gp.input_weight);
    for (std::size_t i = 0; i < d; ++i) {
      gp.decay_bias[i] += da[i];
      gp.input_bias[i] += dbx[i];
    }
    for (std::size_t j = 0; j < m; ++j) gp.gate_weight[j] += dgate_pre * x[j];
    gp.gate_bias += dgate_pre;

    auto dx = grads.inputs.row(k);
    MatTVecAccumulate(params.decay_weight, da, dx);
    MatTVecAccumulate(params.input_weight, dbx, dx);
    for (std::size_t j = 0; j < m; ++j) dx[j] += dgate_pre * params.gate_weight[j];
  }

  if (const double eps = gradient_perturbation.load(); eps != 0.0) {
    for (double& v : gp.input_weight.data()) v *= 1.0 + eps;
  }
  return grads;
}

std::vector<double> RingDescriptor(const SsmRun& run) {
  std::vector<double> z(run.state_width, 0.0);
  const std::size_t t_len = run.length();
  if (t_len == 0) return z;
  for (std::size_t k = 0; k < t_len; ++k) {
    auto y = run.outputs.row(k);
    for (std::size_t i = 0; i < z.size(); ++i) z[i] += y[i];
  }
  for (double& v : z) v /= static_cast<double>(t_len);
  return z;
}

SsmRun RadialForward(const Matrix& descriptors, const SsmParams& radial) {
  if (descriptors.cols() != radial.token_width) {
    throw ShapeError("RadialForward: descriptor width must equal the radial "
                     "token width");
  }
  TokenSequence seq;
  seq.tokens = descriptors;
  seq.mask.assign(descriptors.rows(), 1);
  return SsmForward(seq, radial);
}

}  // namespace prism
