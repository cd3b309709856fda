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

#ifndef PRISM_SSM_H_
#define PRISM_SSM_H_

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "prism/grid.h"
#include "prism/linalg.h"

namespace prism {

/// T tokens of width m, plus a validity flag per token carried over from the
/// pixels they were read from.
struct TokenSequence {
  Matrix tokens;                    // T x m
  std::vector<std::uint8_t> mask;   // T entries, 1 = valid

  TokenSequence() = default;
  TokenSequence(std::size_t length, std::size_t width)
      : tokens(length, width), mask(length, 1) {}

  std::size_t length() const { return tokens.rows(); }
  std::size_t width() const { return tokens.cols(); }
};

/// Weights of one selective SSM.
///
/// Per token x (width m) the projector produces
///   A  = exp(-softplus(W_A x + b_A))   decay in (0, 1), width d
///   Bx = W_B x + b_B                   input drive, width d
///   g  = sigmoid(w_g . x + b_g)        output gate
/// and the recurrence is h_k = A_k (.) h_{k-1} + Bx_k, y_k = g_k C0 h_k.
struct SsmParams {
  std::size_t token_width = 0;  // m
  std::size_t state_width = 0;  // d
  Matrix decay_weight;          // W_A, d x m
  std::vector<double> decay_bias;  // b_A, d
  Matrix input_weight;          // W_B, d x m
  std::vector<double> input_bias;  // b_B, d
  Matrix mix;                   // C0, d x d
  std::vector<double> gate_weight;  // w_g, m
  double gate_bias = 0.0;       // b_g

  /// All-zero parameters of the given shape.
  static SsmParams Zeros(std::size_t token_width, std::size_t state_width);
  /// Weights ~ uniform(-weight_bound, weight_bound), biases zero except
  /// b_A = 1.
  static SsmParams Random(std::size_t token_width, std::size_t state_width,
                          Seed seed, double weight_bound = 0.1);

  /// Number of scalar parameters.
  std::size_t ParameterCount() const;
  /// Flattened parameters in declaration order.
  std::vector<double> Flatten() const;
  /// Inverse of Flatten. Throws ShapeError on a length mismatch.
  void Unflatten(std::span<const double> flat);
  /// this += other (same shape).
  void Accumulate(const SsmParams& other);

  friend bool operator==(const SsmParams&, const SsmParams&) = default;
};

/// Sets b_A so that every decay is below 1e-13 and the state is effectively
/// unused.
void MakeMemoryless(SsmParams& params);

struct StepParams {
  std::vector<double> decay;  // A, d
  std::vector<double> drive;  // Bx, d
  double gate = 0.0;          // g
};

/// Per-token parameter projection. Throws ShapeError if x.size() != m.
StepParams ProjectParams(std::span<const double> x, const SsmParams& params);

/// Everything the backward pass needs from one forward run.
struct SsmRun {
  std::size_t state_width = 0;
  Matrix inputs;                   // T x m
  std::vector<std::uint8_t> mask;  // T
  Matrix decay;                    // T x d
  Matrix drive;                    // T x d
  std::vector<double> gate;        // T
  Matrix states;                   // T x d
  Matrix outputs;                  // T x d

  std::size_t length() const { return inputs.rows(); }
  /// h_T, or zeros when T = 0.
  std::vector<double> final_state() const;
  /// Outputs packaged as a token sequence carrying the input mask.
  TokenSequence OutputSequence() const;
};

/// Runs the recurrence from h_0 = 0. Masked tokens decay the state without
/// injecting their drive. T = 0 yields an empty run.
SsmRun SsmForward(const TokenSequence& seq, const SsmParams& params);

struct SsmGradients {
  Matrix inputs;      // dL/dx, T x m
  SsmParams params;   // dL/dparams, same layout as the weights
};

/// Reverse-mode gradient of SsmForward given dL/dy (T x d).
SsmGradients SsmBackward(const SsmRun& run, const SsmParams& params,
                         const Matrix& output_grad);

/// Mean of the per-step outputs; the zero vector for an empty run.
std::vector<double> RingDescriptor(const SsmRun& run);

/// Runs the radial SSM over ring descriptors (row r = z_r, innermost first).
SsmRun RadialForward(const Matrix& descriptors, const SsmParams& radial);

double Softplus(double x);
double Sigmoid(double x);

/// Scales the analytic input-weight gradient of SsmBackward by
/// (1 + relative). Zero (the default) disables it. Only the verification
/// self-test uses this.
void SetGradientPerturbationForTesting(double relative);

}  // namespace prism

#endif  // PRISM_SSM_H_
