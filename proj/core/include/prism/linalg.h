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

// Small dense linear algebra used by every kernel in the library.
//
// All multiply-accumulate work in the kernels goes through the counted
// primitives below (`Dot`, `MatVec`, `MatTVec`, `DecayAccumulate`). When a
// `MacCountScope` is active on the calling thread each primitive adds the
// number of multiply-accumulates it performed, which gives an instrumented
// count that is independent of the analytic formulas in `CountMacs`.

#ifndef PRISM_LINALG_H_
#define PRISM_LINALG_H_

#include <cstddef>
#include <cstdint>
#include <random>
#include <span>
#include <vector>

namespace prism {

/// Row-major dense matrix of doubles.
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols, double fill = 0.0)
      : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

  static Matrix Identity(std::size_t n);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  std::size_t size() const { return data_.size(); }
  bool empty() const { return data_.empty(); }

  double& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
  double operator()(std::size_t r, std::size_t c) const {
    return data_[r * cols_ + c];
  }

  std::span<double> row(std::size_t r) { return {data_.data() + r * cols_, cols_}; }
  std::span<const double> row(std::size_t r) const {
    return {data_.data() + r * cols_, cols_};
  }

  std::span<double> data() { return data_; }
  std::span<const double> data() const { return data_; }

  /// Copy of the columns listed in `cols`, in that order.
  Matrix SelectColumns(std::span<const std::size_t> cols) const;
  /// Copy of the rows listed in `rows`, in that order.
  Matrix SelectRows(std::span<const std::size_t> rows) const;

  void Fill(double value);

  friend bool operator==(const Matrix&, const Matrix&) = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

/// Fills `values` with draws from uniform(-bound, bound).
void FillUniform(std::span<double> values, double bound, std::mt19937_64& rng);

// Counted primitives ------------------------------------------------------

/// <a, b>; counts a.size() MACs.
double Dot(std::span<const double> a, std::span<const double> b);

/// out = m * x; counts rows*cols MACs.
void MatVec(const Matrix& m, std::span<const double> x, std::span<double> out);

/// out += m^T * x; counts rows*cols MACs.
void MatTVecAccumulate(const Matrix& m, std::span<const double> x,
                       std::span<double> out);

/// state = decay (.) state + input, elementwise; counts state.size() MACs.
void DecayAccumulate(std::span<const double> decay, std::span<double> state,
                     std::span<const double> input);

/// acc += a * b^T (outer product); not counted, used by backward passes only.
void OuterAccumulate(std::span<const double> a, std::span<const double> b,
                     Matrix& acc);

/// Enables MAC counting on the current thread for the lifetime of the scope.
/// Scopes nest; every enclosing scope receives the counts.
class MacCountScope {
 public:
  MacCountScope();
  ~MacCountScope();
  MacCountScope(const MacCountScope&) = delete;
  MacCountScope& operator=(const MacCountScope&) = delete;

  std::uint64_t count() const { return count_; }

 private:
  friend void AddMacs(std::uint64_t n);
  std::uint64_t count_ = 0;
  MacCountScope* previous_;
};

void AddMacs(std::uint64_t n);

}  // namespace prism

#endif  // PRISM_LINALG_H_
