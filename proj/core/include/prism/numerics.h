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

// Reference computations used to check the kernels. Nothing here calls into
// ssm.cc; the SSM oracle evaluates the unrolled closed form directly.

#ifndef PRISM_NUMERICS_H_
#define PRISM_NUMERICS_H_

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

#include "prism/linalg.h"
#include "prism/ssm.h"

namespace prism {

/// y_k = g_k C0 sum_{j<=k} (prod_{i=j+1..k} A_i) (.) Bx_j, skipping the
/// drive of masked tokens. O(T^2 d) on purpose.
Matrix OracleSsm(const TokenSequence& seq, const SsmParams& params);

using ScalarFunction = std::function<double(std::span<const double>)>;

/// Central differences (f(x + h e_i) - f(x - h e_i)) / 2h for every i.
/// Throws ParameterError if h <= 0.
std::vector<double> FiniteDiff(const ScalarFunction& f,
                               std::span<const double> point, double h);

/// |a - n| / max(|a|, |n|, 1e-12).
double RelativeError(double analytic, double numeric);

struct FiniteDiffReport {
  std::vector<double> relative_errors;
  double max_relative_error = 0.0;
  double step = 0.0;
  std::size_t compared = 0;
};

FiniteDiffReport CompareGradients(std::span<const double> analytic,
                                  std::span<const double> numeric, double h);

struct PairedDeviation {
  double mean_difference = 0.0;  // mean(a_i - b_i)
  double win_fraction = 0.0;     // fraction with a_i < b_i
  std::size_t count = 0;
};

/// Throws ShapeError on unequal or zero lengths.
PairedDeviation PairedDeviationOf(std::span<const double> a,
                                  std::span<const double> b);

/// Least-squares slope of log(y) against log(x).
double LogLogSlope(std::span<const double> x, std::span<const double> y);

}  // namespace prism

#endif  // PRISM_NUMERICS_H_
