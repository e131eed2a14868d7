// Copyright 2026 The Authors.
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

// Dense linear-algebra vocabulary shared by every module: matrix aliases,
// the sorted item-set type, log-domain scalars and a few determinant and
// eigendecomposition helpers.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <initializer_list>
#include <limits>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "dpp/error.hpp"

namespace dpp {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using Index = Eigen::Index;

inline constexpr double kNegInf = -std::numeric_limits<double>::infinity();

/// Sorted set of distinct item indices.
class Subset {
 public:
  Subset() = default;
  Subset(std::initializer_list<std::size_t> items)
      : Subset(std::vector<std::size_t>(items)) {}
  explicit Subset(std::vector<std::size_t> items) : items_(std::move(items)) {
    std::sort(items_.begin(), items_.end());
    if (std::adjacent_find(items_.begin(), items_.end()) != items_.end()) {
      fail(ErrorCode::kInvalidInput, "subset contains a repeated item");
    }
  }

  /// Builds a subset and checks every index against the ground-set size.
  static Subset of(std::vector<std::size_t> items, std::size_t n) {
    Subset s(std::move(items));
    if (!s.empty() && s.items_.back() >= n) {
      fail(ErrorCode::kInvalidInput,
           "item " + std::to_string(s.items_.back()) + " out of range for N=" +
               std::to_string(n));
    }
    return s;
  }

  static Subset from_mask(unsigned long long mask) {
    Subset s;
    for (std::size_t i = 0; mask != 0; ++i, mask >>= 1) {
      if (mask & 1ULL) s.items_.push_back(i);
    }
    return s;
  }

  unsigned long long mask() const {
    unsigned long long m = 0;
    for (auto i : items_) m |= 1ULL << i;
    return m;
  }

  std::size_t size() const { return items_.size(); }
  bool empty() const { return items_.empty(); }
  bool contains(std::size_t i) const {
    return std::binary_search(items_.begin(), items_.end(), i);
  }
  auto begin() const { return items_.begin(); }
  auto end() const { return items_.end(); }
  std::size_t operator[](std::size_t k) const { return items_[k]; }
  const std::vector<std::size_t>& items() const { return items_; }

  std::vector<Index> indices() const {
    return std::vector<Index>(items_.begin(), items_.end());
  }

  friend bool operator==(const Subset&, const Subset&) = default;
  friend auto operator<=>(const Subset&, const Subset&) = default;

 private:
  std::vector<std::size_t> items_;
};

/// Items of [0, n) not in `s`.
inline Subset complement(const Subset& s, std::size_t n) {
  std::vector<std::size_t> out;
  out.reserve(n - std::min(n, s.size()));
  for (std::size_t i = 0; i < n; ++i) {
    if (!s.contains(i)) out.push_back(i);
  }
  return Subset(std::move(out));
}

/// A nonnegative quantity carried in both log and linear form; the linear
/// value may overflow to infinity while the log stays finite.
struct LogValue {
  double log_value = 0.0;
  double value = 1.0;

  static LogValue from_log(double lv) { return {lv, std::exp(lv)}; }
};

using Probability = LogValue;

inline Matrix principal_submatrix(const Matrix& m, const Subset& s) {
  const auto idx = s.indices();
  return m(idx, idx);
}

inline Matrix symmetrized(const Matrix& m) { return 0.5 * (m + m.transpose()); }

/// log det of a symmetric positive semidefinite matrix; -inf when singular.
/// A 0x0 matrix has determinant one.
inline double log_det_psd(const Matrix& m) {
  if (m.rows() == 0) return 0.0;
  Eigen::LLT<Matrix> llt(m);
  if (llt.info() == Eigen::Success) {
    const Vector d = llt.matrixL().toDenseMatrix().diagonal();
    double s = 0.0;
    for (Index i = 0; i < d.size(); ++i) {
      if (!(d(i) > 0.0)) return kNegInf;
      s += 2.0 * std::log(d(i));
    }
    return s;
  }
  Eigen::SelfAdjointEigenSolver<Matrix> es(m, Eigen::EigenvaluesOnly);
  double s = 0.0;
  for (Index i = 0; i < es.eigenvalues().size(); ++i) {
    const double v = es.eigenvalues()(i);
    if (!(v > 0.0)) return kNegInf;
    s += std::log(v);
  }
  return s;
}

/// Signed determinant of a general square matrix via partial-pivot LU.
inline double det_general(const Matrix& m) {
  if (m.rows() == 0) return 1.0;
  return Eigen::PartialPivLU<Matrix>(m).determinant();
}

/// True when the smallest eigenvalue exceeds `rel_tol` times max(1, largest).
inline bool is_positive_definite(const Matrix& m, double rel_tol = 1e-12) {
  if (m.rows() == 0) return true;
  Eigen::SelfAdjointEigenSolver<Matrix> es(m, Eigen::EigenvaluesOnly);
  const double hi = std::max(1.0, es.eigenvalues().maxCoeff());
  return es.eigenvalues().minCoeff() > rel_tol * hi;
}

/// Relative difference used throughout the tests and the acceptance suite.
inline double rel_diff(double a, double b) {
  const double scale = std::max({std::abs(a), std::abs(b), 1e-300});
  return std::abs(a - b) / scale;
}

}  // namespace dpp
