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

// Shared fixtures for the test suite and the acceptance runner.

#pragma once

#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include "dpp/dpp.hpp"

namespace dpp::testing {

inline Matrix gaussian(Index rows, Index cols, Rng& rng, double sd = 1.0) {
  Matrix m(rows, cols);
  for (Index i = 0; i < rows; ++i) {
    for (Index j = 0; j < cols; ++j) m(i, j) = sd * rng.normal();
  }
  return m;
}

/// B^T B with B of size rank x n, scaled by `scale`.
inline Matrix random_psd(Index n, Rng& rng, Index rank = -1, double scale = 1.0) {
  const Matrix b = gaussian(rank < 0 ? n : rank, n, rng);
  return symmetrized(scale * b.transpose() * b / static_cast<double>(b.rows()));
}

inline QualityDiversity random_qd(Index n, Index d, Rng& rng) {
  Vector q(n);
  for (Index i = 0; i < n; ++i) q(i) = 0.5 + rng.uniform();
  Matrix phi = gaussian(d, n, rng);
  for (Index i = 0; i < n; ++i) phi.col(i).normalize();
  return QualityDiversity::make(q, phi);
}

inline Subset random_subset(std::size_t n, Rng& rng, double p = 0.5) {
  std::vector<std::size_t> items;
  for (std::size_t i = 0; i < n; ++i) {
    if (rng.bernoulli(p)) items.push_back(i);
  }
  return Subset(items);
}

/// |a - b| <= tol * max(|a|, |b|, tiny).
inline bool rel_close(double a, double b, double tol) {
  const double s = std::max({std::abs(a), std::abs(b), 1e-300});
  return std::abs(a - b) <= tol * s;
}

inline double rel_err(const Matrix& a, const Matrix& b) {
  const double s = std::max({a.norm(), b.norm(), 1e-300});
  return (a - b).norm() / s;
}

/// Chain model with random nonnegative quality and unit features on every
/// factor (pairwise features optional).
inline SdppModel random_chain(std::size_t r, std::size_t m, Index d, Rng& rng,
                              bool pairwise_features = true) {
  FactorTree tree = FactorTree::chain(r, m);
  std::vector<FactorTable> tables(tree.factor_count());
  for (std::size_t f = 0; f < tree.factor_count(); ++f) {
    const std::size_t configs = tree.config_count(f);
    FactorTable t;
    t.q.resize(static_cast<Index>(configs));
    for (std::size_t c = 0; c < configs; ++c) t.q(static_cast<Index>(c)) = 0.3 + rng.uniform();
    if (f < r || pairwise_features) {
      t.phi = gaussian(d, static_cast<Index>(configs), rng);
      for (Index c = 0; c < t.phi.cols(); ++c) t.phi.col(c).normalize();
    } else {
      t.phi.resize(d, 0);
    }
    tables[f] = std::move(t);
  }
  return SdppModel(std::move(tree), std::move(tables), d);
}

/// Instances with N items, m quality features and D-dimensional unit
/// diversity features, labels drawn from the model at theta_star.
inline std::vector<ConditionalInstance> synthetic_instances(const Vector& theta_star, std::size_t count,
                                                            Index n, Index d, Rng& rng) {
  std::vector<ConditionalInstance> out;
  for (std::size_t t = 0; t < count; ++t) {
    ConditionalInstance inst;
    inst.f = gaussian(theta_star.size(), n, rng);
    inst.phi = gaussian(d, n, rng);
    for (Index i = 0; i < n; ++i) inst.phi.col(i).normalize();
    const auto ens = instance_ensemble(theta_star, inst);
    inst.y = sample(ens.spectrum(), rng);
    out.push_back(std::move(inst));
  }
  return out;
}

inline std::vector<PreferencePair> random_pairs(std::size_t n, std::size_t k, std::size_t count, Rng& rng) {
  const auto draw = [&] {
    std::vector<std::size_t> perm(n);
    for (std::size_t i = 0; i < n; ++i) perm[i] = i;
    for (std::size_t i = n - 1; i > 0; --i) std::swap(perm[i], perm[rng.uniform_index(i + 1)]);
    perm.resize(k);
    return Subset::of(perm, n);
  };
  std::vector<PreferencePair> out;
  for (std::size_t t = 0; t < count; ++t) out.push_back({draw(), draw()});
  return out;
}

/// Code of the dpp::Error thrown by fn, or nullopt if it returns.
template <class Fn>
std::optional<ErrorCode> error_code(Fn&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  return std::nullopt;
}

inline std::string source_path(const std::string& rel) {
  return std::string(DPP_SOURCE_DIR) + "/" + rel;
}

}  // namespace dpp::testing
