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

#include <algorithm>
#include <cmath>
#include <numeric>

#include "prism/errors.h"

namespace prism {
namespace {

// Local copies so the oracle shares no arithmetic with the kernel.
double OracleSoftplus(double x) {
  return x > 0 ? x + std::log(1.0 + std::exp(-x)) : std::log(1.0 + std::exp(x));
}

double OracleSigmoid(double x) { return 0.5 * (1.0 + std::tanh(0.5 * x)); }

}  // namespace

Matrix OracleSsm(const TokenSequence& seq, const SsmParams& p) {
  const std::size_t t_len = seq.length();
  const std::size_t m = p.token_width;
  const std::size_t d = p.state_width;
  if (seq.width() != m) throw ShapeError("OracleSsm: token width mismatch");

  // Per-step decay, drive, and gate evaluated straight from the weights.
  std::vector<std::vector<double>> decay(t_len, std::vector<double>(d));
  std::vector<std::vector<double>> drive(t_len, std::vector<double>(d));
  std::vector<double> gate(t_len);
  for (std::size_t k = 0; k < t_len; ++k) {
    for (std::size_t i = 0; i < d; ++i) {
      double a = p.decay_bias[i];
      double b = p.input_bias[i];
      for (std::size_t j = 0; j < m; ++j) {
        a += p.decay_weight(i, j) * seq.tokens(k, j);
        b += p.input_weight(i, j) * seq.tokens(k, j);
      }
      decay[k][i] = std::exp(-OracleSoftplus(a));
      drive[k][i] = seq.mask[k] != 0 ? b : 0.0;
    }
    double g = p.gate_bias;
    for (std::size_t j = 0; j < m; ++j) g += p.gate_weight[j] * seq.tokens(k, j);
    gate[k] = OracleSigmoid(g);
  }

  Matrix y(t_len, d);
  std::vector<double> h(d);
  for (std::size_t k = 0; k < t_len; ++k) {
    std::fill(h.begin(), h.end(), 0.0);
    for (std::size_t j = 0; j <= k; ++j) {
      for (std::size_t i = 0; i < d; ++i) {
        double product = 1.0;
        for (std::size_t l = j + 1; l <= k; ++l) product *= decay[l][i];
        h[i] += product * drive[j][i];
      }
    }
    for (std::size_t r = 0; r < d; ++r) {
      double acc = 0.0;
      for (std::size_t i = 0; i < d; ++i) acc += p.mix(r, i) * h[i];
      y(k, r) = gate[k] * acc;
    }
  }
  return y;
}

std::vector<double> FiniteDiff(const ScalarFunction& f,
                               std::span<const double> point, double h) {
  if (!(h > 0.0)) throw ParameterError("finite-difference step must be positive");
  std::vector<double> x(point.begin(), point.end());
  std::vector<double> grad(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double saved = x[i];
    x[i] = saved + h;
    const double plus = f(x);
    x[i] = saved - h;
    const double minus = f(x);
    x[i] = saved;
    grad[i] = (plus - minus) / (2.0 * h);
  }
  return grad;
}

double RelativeError(double analytic, double numeric) {
  const double scale =
      std::max({std::abs(analytic), std::abs(numeric), 1e-12});
  return std::abs(analytic - numeric) / scale;
}

FiniteDiffReport CompareGradients(std::span<const double> analytic,
                                  std::span<const double> numeric, double h) {
  if (analytic.size() != numeric.size()) {
    throw ShapeError("CompareGradients: length mismatch");
  }
  FiniteDiffReport report;
  report.step = h;
  report.compared = analytic.size();
  report.relative_errors.resize(analytic.size());
  for (std::size_t i = 0; i < analytic.size(); ++i) {
    report.relative_errors[i] = RelativeError(analytic[i], numeric[i]);
    report.max_relative_error =
        std::max(report.max_relative_error, report.relative_errors[i]);
  }
  return report;
}

PairedDeviation PairedDeviationOf(std::span<const double> a,
                                  std::span<const double> b) {
  if (a.size() != b.size() || a.empty()) {
    throw ShapeError("paired deviation needs two equal, nonempty lists");
  }
  PairedDeviation out;
  out.count = a.size();
  double diff = 0.0;
  std::size_t wins = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    diff += a[i] - b[i];
    if (a[i] < b[i]) ++wins;
  }
  out.mean_difference = diff / static_cast<double>(a.size());
  out.win_fraction = static_cast<double>(wins) / static_cast<double>(a.size());
  return out;
}

double LogLogSlope(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size() || x.size() < 2) {
    throw ShapeError("LogLogSlope needs at least two paired points");
  }
  const std::size_t n = x.size();
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < n; ++i) {
    mx += std::log(x[i]);
    my += std::log(y[i]);
  }
  mx /= static_cast<double>(n);
  my /= static_cast<double>(n);
  double sxy = 0, sxx = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const double dx = std::log(x[i]) - mx;
    sxy += dx * (std::log(y[i]) - my);
    sxx += dx * dx;
  }
  return sxy / sxx;
}

}  // namespace prism
