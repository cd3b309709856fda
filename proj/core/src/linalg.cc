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

#include <cassert>

namespace prism {
namespace {

thread_local MacCountScope* active_scope = nullptr;

}  // namespace

Matrix Matrix::Identity(std::size_t n) {
  Matrix m(n, n);
  for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
  return m;
}

Matrix Matrix::SelectColumns(std::span<const std::size_t> cols) const {
  Matrix out(rows_, cols.size());
  for (std::size_t r = 0; r < rows_; ++r) {
    for (std::size_t j = 0; j < cols.size(); ++j) out(r, j) = (*this)(r, cols[j]);
  }
  return out;
}

Matrix Matrix::SelectRows(std::span<const std::size_t> rows) const {
  Matrix out(rows.size(), cols_);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    auto src = row(rows[i]);
    std::copy(src.begin(), src.end(), out.row(i).begin());
  }
  return out;
}

void Matrix::Fill(double value) { std::fill(data_.begin(), data_.end(), value); }

void FillUniform(std::span<double> values, double bound, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> dist(-bound, bound);
  for (double& v : values) v = dist(rng);
}

double Dot(std::span<const double> a, std::span<const double> b) {
  assert(a.size() == b.size());
  double sum = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) sum += a[i] * b[i];
  AddMacs(a.size());
  return sum;
}

void MatVec(const Matrix& m, std::span<const double> x, std::span<double> out) {
  assert(x.size() == m.cols() && out.size() == m.rows());
  for (std::size_t r = 0; r < m.rows(); ++r) {
    auto w = m.row(r);
    double sum = 0.0;
    for (std::size_t c = 0; c < w.size(); ++c) sum += w[c] * x[c];
    out[r] = sum;
  }
  AddMacs(m.rows() * m.cols());
}

void MatTVecAccumulate(const Matrix& m, std::span<const double> x,
                       std::span<double> out) {
  assert(x.size() == m.rows() && out.size() == m.cols());
  for (std::size_t r = 0; r < m.rows(); ++r) {
    auto w = m.row(r);
    const double xr = x[r];
    for (std::size_t c = 0; c < w.size(); ++c) out[c] += w[c] * xr;
  }
  AddMacs(m.rows() * m.cols());
}

void DecayAccumulate(std::span<const double> decay, std::span<double> state,
                     std::span<const double> input) {
  assert(decay.size() == state.size() && input.size() == state.size());
  for (std::size_t i = 0; i < state.size(); ++i) {
    state[i] = decay[i] * state[i] + input[i];
  }
  AddMacs(state.size());
}

void OuterAccumulate(std::span<const double> a, std::span<const double> b,
                     Matrix& acc) {
  assert(acc.rows() == a.size() && acc.cols() == b.size());
  for (std::size_t r = 0; r < a.size(); ++r) {
    auto dst = acc.row(r);
    const double ar = a[r];
    for (std::size_t c = 0; c < b.size(); ++c) dst[c] += ar * b[c];
  }
}

MacCountScope::MacCountScope() : previous_(active_scope) { active_scope = this; }

MacCountScope::~MacCountScope() { active_scope = previous_; }

void AddMacs(std::uint64_t n) {
  for (MacCountScope* s = active_scope; s != nullptr; s = s->previous_) {
    s->count_ += n;
  }
}

}  // namespace prism
