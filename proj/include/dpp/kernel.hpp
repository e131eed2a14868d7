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

// Kernel construction and conversion: L-ensembles, marginal kernels, the
// quality/diversity factorization and the eigendecomposition every
// inference routine starts from.

#pragma once

#include <array>
#include <optional>
#include <string>

#include "dpp/linalg.hpp"

namespace dpp {

inline constexpr double kSymmetryTol = 1e-9;
inline constexpr double kClampRelTol = 1e-8;
inline constexpr double kUnitNormTol = 1e-6;

/// Eigenpairs of a symmetric matrix, eigenvalues nonincreasing.
struct SpectralDecomposition {
  Vector eigenvalues;
  Matrix eigenvectors;

  /// Decomposes `a`. With `clamp_psd`, eigenvalues in
  /// [-1e-8 max(1, lambda_max), 0) become exactly zero and anything more
  /// negative is rejected as not positive semidefinite.
  static SpectralDecomposition of(const Matrix& a, bool clamp_psd = true) {
    SpectralDecomposition out;
    const Index n = a.rows();
    if (n == 0) return out;
    Eigen::SelfAdjointEigenSolver<Matrix> es(a);
    if (es.info() != Eigen::Success) {
      fail(ErrorCode::kInvalidInput, "eigendecomposition did not converge");
    }
    out.eigenvalues = es.eigenvalues().reverse();
    out.eigenvectors = es.eigenvectors().rowwise().reverse();
    if (clamp_psd) {
      const double floor = -kClampRelTol * std::max(1.0, out.eigenvalues(0));
      for (Index i = 0; i < n; ++i) {
        double& v = out.eigenvalues(i);
        if (v < 0.0) {
          if (v < floor) {
            fail(ErrorCode::kInvalidInput,
                 "matrix is not positive semidefinite (eigenvalue " +
                     std::to_string(v) + ")");
          }
          v = 0.0;
        }
      }
    }
    return out;
  }

  std::size_t size() const { return static_cast<std::size_t>(eigenvalues.size()); }

  Matrix reconstruct() const {
    return eigenvectors * eigenvalues.asDiagonal() * eigenvectors.transpose();
  }
};

/// Per-item quality q_i > 0 and unit-norm diversity columns phi_i (D x N).
struct QualityDiversity {
  Vector quality;
  Matrix features;

  /// Validates the factorization. Columns within 1e-6 of unit norm are
  /// renormalized; anything farther is an error.
  static QualityDiversity make(Vector q, Matrix phi) {
    check_shapes(q, phi);
    for (Index i = 0; i < phi.cols(); ++i) {
      const double norm = phi.col(i).norm();
      if (!(norm > 0.0)) {
        fail(ErrorCode::kInvalidInput,
             "feature column " + std::to_string(i) + " has zero norm");
      }
      if (std::abs(norm - 1.0) > kUnitNormTol) {
        fail(ErrorCode::kInvalidInput,
             "feature column " + std::to_string(i) + " has norm " +
                 std::to_string(norm) + ", expected unit norm");
      }
      phi.col(i) /= norm;
    }
    return {std::move(q), std::move(phi)};
  }

  /// Skips the unit-norm requirement; used for randomly projected features.
  static QualityDiversity unnormalized(Vector q, Matrix phi) {
    check_shapes(q, phi);
    return {std::move(q), std::move(phi)};
  }

  std::size_t size() const { return static_cast<std::size_t>(quality.size()); }
  Index dim() const { return features.rows(); }

  /// B = Phi diag(q), so that L = B^T B.
  Matrix columns() const { return features * quality.asDiagonal(); }

 private:
  static void check_shapes(const Vector& q, const Matrix& phi) {
    if (q.size() != phi.cols()) {
      fail(ErrorCode::kDimensionMismatch,
           "quality has " + std::to_string(q.size()) + " entries but features have " +
               std::to_string(phi.cols()) + " columns");
    }
    for (Index i = 0; i < q.size(); ++i) {
      if (!(q(i) > 0.0) || !std::isfinite(q(i))) {
        fail(ErrorCode::kInvalidInput,
             "quality of item " + std::to_string(i) + " must be positive");
      }
    }
    if (!phi.allFinite()) fail(ErrorCode::kInvalidInput, "non-finite feature entry");
  }
};

enum class Provenance { kExplicit, kGram };

/// Positive semidefinite kernel L defining P(Y) proportional to det(L_Y).
class LEnsemble {
 public:
  LEnsemble() = default;

  /// Ingests an explicit kernel. Asymmetry up to 1e-9 is averaged away;
  /// larger asymmetry or a clearly negative eigenvalue is rejected.
  static LEnsemble from_matrix(const Matrix& l) {
    if (l.rows() != l.cols()) {
      fail(ErrorCode::kDimensionMismatch, "kernel must be square");
    }
    if (!l.allFinite()) fail(ErrorCode::kInvalidInput, "non-finite kernel entry");
    if (l.rows() > 0) {
      const double asym = (l - l.transpose()).cwiseAbs().maxCoeff();
      if (asym > kSymmetryTol) {
        fail(ErrorCode::kInvalidInput,
             "kernel asymmetry " + std::to_string(asym) + " exceeds 1e-9");
      }
    }
    LEnsemble out;
    out.l_ = symmetrized(l);
    SpectralDecomposition::of(out.l_);  // PSD check
    return out;
  }

  static LEnsemble from_quality_diversity(QualityDiversity qd) {
    LEnsemble out;
    const Matrix b = qd.columns();
    out.l_ = b.transpose() * b;
    out.provenance_ = Provenance::kGram;
    out.factors_ = std::move(qd);
    return out;
  }

  /// Trusted construction for kernels produced by exact conversions.
  static LEnsemble unchecked(Matrix l) {
    LEnsemble out;
    out.l_ = symmetrized(l);
    return out;
  }

  std::size_t size() const { return static_cast<std::size_t>(l_.rows()); }
  const Matrix& matrix() const { return l_; }
  Provenance provenance() const { return provenance_; }
  const std::optional<QualityDiversity>& factors() const { return factors_; }

  SpectralDecomposition spectrum() const { return SpectralDecomposition::of(l_); }

 private:
  Matrix l_;
  Provenance provenance_ = Provenance::kExplicit;
  std::optional<QualityDiversity> factors_;
};

/// Inclusion-marginal kernel K with spectrum in [0, 1].
class MarginalKernel {
 public:
  MarginalKernel() = default;

  static MarginalKernel from_matrix(const Matrix& k) {
    if (k.rows() != k.cols()) fail(ErrorCode::kDimensionMismatch, "K must be square");
    if (k.rows() > 0 && (k - k.transpose()).cwiseAbs().maxCoeff() > kSymmetryTol) {
      fail(ErrorCode::kInvalidInput, "marginal kernel is not symmetric");
    }
    MarginalKernel out;
    out.k_ = symmetrized(k);
    if (k.rows() > 0) {
      Eigen::SelfAdjointEigenSolver<Matrix> es(out.k_, Eigen::EigenvaluesOnly);
      if (es.eigenvalues().minCoeff() < -1e-9 || es.eigenvalues().maxCoeff() > 1.0 + 1e-9) {
        fail(ErrorCode::kInvalidInput, "marginal kernel eigenvalues must lie in [0, 1]");
      }
    }
    return out;
  }

  static MarginalKernel unchecked(Matrix k) {
    MarginalKernel out;
    out.k_ = symmetrized(k);
    return out;
  }

  std::size_t size() const { return static_cast<std::size_t>(k_.rows()); }
  const Matrix& matrix() const { return k_; }

  /// P(i in Y), clamped to [0, 1].
  double item_marginal(std::size_t i) const {
    return std::clamp(k_(static_cast<Index>(i), static_cast<Index>(i)), 0.0, 1.0);
  }

 private:
  Matrix k_;
};

inline LEnsemble gram_from_features(const Vector& q, const Matrix& phi) {
  return LEnsemble::from_quality_diversity(QualityDiversity::make(q, phi));
}

/// S_ij = L_ij / sqrt(L_ii L_jj).
inline Matrix similarity(const LEnsemble& ensemble) {
  const Matrix& l = ensemble.matrix();
  const Index n = l.rows();
  Vector inv_sqrt(n);
  for (Index i = 0; i < n; ++i) {
    if (!(l(i, i) > 0.0)) {
      fail(ErrorCode::kDegenerateItem,
           "item " + std::to_string(i) + " has zero diagonal entry");
    }
    inv_sqrt(i) = 1.0 / std::sqrt(l(i, i));
  }
  Matrix s = inv_sqrt.asDiagonal() * l * inv_sqrt.asDiagonal();
  s.diagonal().setOnes();
  return s;
}

/// K = sum_n lambda_n / (lambda_n + 1) v_n v_n^T.
inline MarginalKernel l_to_k(const SpectralDecomposition& spec) {
  Vector scaled = spec.eigenvalues.array() / (spec.eigenvalues.array() + 1.0);
  return MarginalKernel::unchecked(spec.eigenvectors * scaled.asDiagonal() *
                                   spec.eigenvectors.transpose());
}

/// L = K (I - K)^{-1}; fails when K has an eigenvalue of (numerically) one,
/// in which case the empty set has probability zero.
inline LEnsemble k_to_l(const SpectralDecomposition& spec) {
  const Index n = spec.eigenvalues.size();
  Vector scaled(n);
  for (Index i = 0; i < n; ++i) {
    const double v = spec.eigenvalues(i);
    if (v >= 1.0 - 1e-8) {
      fail(ErrorCode::kNotLEnsemble,
           "marginal kernel has eigenvalue " + std::to_string(v) +
               " >= 1 - 1e-8; the DPP is not an L-ensemble");
    }
    scaled(i) = v / (1.0 - v);
  }
  return LEnsemble::unchecked(spec.eigenvectors * scaled.asDiagonal() *
                              spec.eigenvectors.transpose());
}

/// det(S_Y) for every Y subset of {1,2,3}, ordered
/// {}, {1}, {2}, {3}, {1,2}, {1,3}, {2,3}, {1,2,3}.
inline std::array<double, 8> ternary_factor_dpp(double s12, double s13, double s23) {
  Matrix s(3, 3);
  s << 1.0, s12, s13, s12, 1.0, s23, s13, s23, 1.0;
  for (double v : {s12, s13, s23}) {
    if (!(std::abs(v) <= 1.0)) {
      fail(ErrorCode::kInvalidInput, "similarity entries must lie in [-1, 1]");
    }
  }
  Eigen::SelfAdjointEigenSolver<Matrix> es(s, Eigen::EigenvaluesOnly);
  if (es.eigenvalues().minCoeff() < -1e-12) {
    fail(ErrorCode::kInvalidInput, "similarity matrix is not positive semidefinite");
  }
  static constexpr std::array<unsigned, 8> kMasks = {0b000, 0b001, 0b010, 0b100,
                                                     0b011, 0b101, 0b110, 0b111};
  std::array<double, 8> out{};
  for (std::size_t k = 0; k < kMasks.size(); ++k) {
    out[k] = det_general(principal_submatrix(s, Subset::from_mask(kMasks[k])));
  }
  return out;
}

}  // namespace dpp
