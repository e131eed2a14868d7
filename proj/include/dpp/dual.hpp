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

// Low-rank inference through C = B B^T (D x D). The N x N kernel is never
// formed; item columns B_i come from a provider callback.

#pragma once

#include <functional>
#include <memory>
#include <vector>

#include "dpp/inference.hpp"

namespace dpp {

/// Returns B_i = q_i phi_i. Must be safe to call concurrently.
using ColumnProvider = std::function<Vector(std::size_t)>;

struct DualRepresentation {
  Matrix c;
  ColumnProvider column;
  std::size_t n_items = 0;
  Index dim = 0;

  /// Accumulates C = sum_i B_i B_i^T from the provider.
  static DualRepresentation from_columns(ColumnProvider column, std::size_t n, Index d) {
    DualRepresentation out{Matrix::Zero(d, d), std::move(column), n, d};
    for (std::size_t i = 0; i < n; ++i) {
      const Vector b = out.column(i);
      if (b.size() != d) fail(ErrorCode::kDimensionMismatch, "column has wrong dimension");
      out.c.selfadjointView<Eigen::Lower>().rankUpdate(b);
    }
    out.c = out.c.selfadjointView<Eigen::Lower>();
    return out;
  }
};

inline DualRepresentation build_dual(const QualityDiversity& qd) {
  auto shared = std::make_shared<const QualityDiversity>(qd);
  ColumnProvider provider = [shared](std::size_t i) -> Vector {
    const Index j = static_cast<Index>(i);
    return shared->quality(j) * shared->features.col(j);
  };
  return DualRepresentation::from_columns(std::move(provider), qd.size(), qd.dim());
}

/// det(C + I_D); equal to det(L + I).
inline LogValue dual_normalizer(const Matrix& c) {
  return normalizer(SpectralDecomposition::of(c));
}

inline LogValue dual_normalizer(const DualRepresentation& dual) { return dual_normalizer(dual.c); }

/// Unit eigenvectors of C with the cached norms v^T C v (= lambda_n).
struct DualEigenbasis {
  Vector eigenvalues;
  Matrix eigenvectors;
  Vector c_norms;

  static DualEigenbasis of(const Matrix& c) {
    const auto spec = SpectralDecomposition::of(c);
    DualEigenbasis out{spec.eigenvalues, spec.eigenvectors, Vector(spec.eigenvalues.size())};
    for (Index n = 0; n < out.eigenvalues.size(); ++n) {
      out.c_norms(n) = out.eigenvectors.col(n).dot(c * out.eigenvectors.col(n));
    }
    return out;
  }

  static DualEigenbasis of(const DualRepresentation& dual) { return of(dual.c); }

  SpectralDecomposition spectrum() const { return {eigenvalues, eigenvectors}; }
};

/// K_ij = sum_n (B_i^T v_n)(B_j^T v_n) / (lambda_n + 1).
inline double dual_marginal_entry(const DualEigenbasis& eigen, const DualRepresentation& dual,
                                  std::size_t i, std::size_t j) {
  if (i >= dual.n_items || j >= dual.n_items) {
    fail(ErrorCode::kInvalidInput, "item index out of range");
  }
  const Vector pi = eigen.eigenvectors.transpose() * dual.column(i);
  const Vector pj = i == j ? pi : Vector(eigen.eigenvectors.transpose() * dual.column(j));
  return (pi.array() * pj.array() / (eigen.eigenvalues.array() + 1.0)).sum();
}

namespace detail {

/// Given projections proj_j = v_j^T B_i of the current basis onto the chosen
/// item, removes the component along B_i: the pivot with the largest
/// |proj| is used to eliminate the item from every other vector and is then
/// dropped. The caller re-orthonormalizes.
inline void eliminate_item(Matrix& v, const Vector& proj) {
  Index pivot = 0;
  const double best = proj.cwiseAbs().maxCoeff(&pivot);
  // No absolute floor: with C-orthonormal columns the projections shrink
  // like 1/sqrt(#items), which is tiny for structured models.
  if (!(best > 0.0) || !std::isfinite(best)) {
    fail(ErrorCode::kInternalDegeneracy, "no pivot vector overlaps the selected item");
  }
  const Vector pv = v.col(pivot);
  for (Index c = 0; c < v.cols(); ++c) {
    if (c != pivot) v.col(c) -= (proj(c) / proj(pivot)) * pv;
  }
  remove_column(v, pivot);
}

inline void c_orthonormalize(Matrix& v, const Matrix& c) {
  orthonormalize_columns(v, [&c](const auto& a, const auto& b) { return a.dot(c * b); });
}

/// v_n / sqrt(v_n^T C v_n) for the chosen eigenvectors.
inline Matrix scaled_dual_basis(const DualEigenbasis& eigen, const std::vector<Index>& chosen) {
  Matrix v(eigen.eigenvectors.rows(), static_cast<Index>(chosen.size()));
  for (std::size_t j = 0; j < chosen.size(); ++j) {
    const Index n = chosen[j];
    v.col(static_cast<Index>(j)) = eigen.eigenvectors.col(n) / std::sqrt(eigen.c_norms(n));
  }
  return v;
}

}  // namespace detail

/// Second phase of dual sampling, starting from a C-orthonormal basis.
inline std::vector<std::size_t> dual_sample_elementary(Matrix v, const DualRepresentation& dual,
                                                       Rng& rng) {
  std::vector<std::size_t> order;
  const std::size_t n = dual.n_items;
  std::vector<double> weights(n);
  Matrix cache;
  // Columns are reused across iterations; fetch once when affordable.
  const bool cached = n * static_cast<std::size_t>(dual.dim) <= (std::size_t{1} << 26);
  if (cached) {
    cache.resize(dual.dim, static_cast<Index>(n));
    for (std::size_t i = 0; i < n; ++i) cache.col(static_cast<Index>(i)) = dual.column(i);
  }
  while (v.cols() > 0) {
    if (cached) {
      Eigen::Map<Vector>(weights.data(), static_cast<Index>(n)) =
          (v.transpose() * cache).colwise().squaredNorm().transpose();
    } else {
      for (std::size_t i = 0; i < n; ++i) weights[i] = (v.transpose() * dual.column(i)).squaredNorm();
    }
    const std::size_t item = rng.discrete(weights);
    order.push_back(item);
    const Vector b = cached ? Vector(cache.col(static_cast<Index>(item))) : dual.column(item);
    detail::eliminate_item(v, v.transpose() * b);
    detail::c_orthonormalize(v, dual.c);
  }
  return order;
}

inline Subset dual_sample(const DualEigenbasis& eigen, const DualRepresentation& dual, Rng& rng) {
  std::vector<Index> chosen;
  for (Index n : sample_eigen_indices(eigen.eigenvalues, rng)) {
    if (eigen.c_norms(n) > 0.0) chosen.push_back(n);
  }
  if (chosen.empty()) return {};
  return Subset(dual_sample_elementary(detail::scaled_dual_basis(eigen, chosen), dual, rng));
}

}  // namespace dpp
