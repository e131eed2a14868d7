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

// Brute-force references. Everything here enumerates subsets or
// structures directly and shares no numerical path with the library beyond
// Eigen's dense factorizations.

#pragma once

#include <cstdlib>
#include <functional>
#include <map>
#include <vector>

#include "dpp/sdpp.hpp"
#include "dpp/stats.hpp"

namespace dpp {

struct EnumerationBudget {
  std::size_t max_subsets = std::size_t{1} << 20;
  std::size_t max_structures = 10000;

  /// Defaults, overridden by DPP_ENUM_BUDGET (max subsets) when set.
  static EnumerationBudget from_env() {
    EnumerationBudget b;
    if (const char* s = std::getenv("DPP_ENUM_BUDGET")) {
      char* end = nullptr;
      const auto v = std::strtoull(s, &end, 10);
      if (end != s && v > 0) b.max_subsets = static_cast<std::size_t>(v);
    }
    return b;
  }
};

/// Determinant by full-pivot LU, accumulating log magnitudes.
inline double oracle_det(const Matrix& m) {
  if (m.rows() == 0) return 1.0;
  Eigen::FullPivLU<Matrix> lu(m);
  const Matrix& u = lu.matrixLU();
  double log_mag = 0.0;
  double sign = static_cast<double>(lu.permutationP().determinant() * lu.permutationQ().determinant());
  for (Index i = 0; i < u.rows(); ++i) {
    const double d = u(i, i);
    if (d == 0.0) return 0.0;
    if (d < 0.0) sign = -sign;
    log_mag += std::log(std::abs(d));
  }
  return sign * std::exp(log_mag);
}

/// Every subset of an N-item ground set with det(L_Y), indexed by bit mask.
class DppTable {
 public:
  DppTable(const Matrix& l, const EnumerationBudget& budget = EnumerationBudget::from_env())
      : n_(static_cast<std::size_t>(l.rows())) {
    if (n_ >= 63 || (std::size_t{1} << n_) > budget.max_subsets) {
      fail(ErrorCode::kOverBudget, "2^" + std::to_string(n_) + " subsets exceed the enumeration budget");
    }
    weights_.resize(std::size_t{1} << n_);
    for (std::size_t mask = 0; mask < weights_.size(); ++mask) {
      const double w = oracle_det(principal_submatrix(l, Subset::from_mask(mask)));
      weights_[mask] = std::max(0.0, w);
      total_ += weights_[mask];
    }
  }

  std::size_t size() const { return n_; }
  std::size_t subset_count() const { return weights_.size(); }
  double weight(std::size_t mask) const { return weights_[mask]; }
  double normalizer() const { return total_; }
  double probability(std::size_t mask) const { return weights_[mask] / total_; }
  double probability(const Subset& y) const { return probability(y.mask()); }

  /// Sum of P(Y) over Y containing `in` and avoiding `out`.
  double partial(const Subset& in, const Subset& out = {}) const {
    const auto a = in.mask();
    const auto b = out.mask();
    double s = 0.0;
    for (std::size_t mask = 0; mask < weights_.size(); ++mask) {
      if ((mask & a) == a && (mask & b) == 0) s += weights_[mask];
    }
    return s / total_;
  }

  double marginal(const Subset& a) const { return partial(a); }
  double complement_marginal(const Subset& a) const { return partial({}, a); }

  /// P(Y | in subset of Y, out disjoint) keyed by the full mask.
  std::map<std::size_t, double> conditional(const Subset& in, const Subset& out) const {
    const double z = partial(in, out);
    std::map<std::size_t, double> table;
    const auto a = in.mask();
    const auto b = out.mask();
    for (std::size_t mask = 0; mask < weights_.size(); ++mask) {
      if ((mask & a) == a && (mask & b) == 0) table[mask] = weights_[mask] / (z * total_);
    }
    return table;
  }

  /// Sum of det(L_Y) over |Y| = k.
  double k_sum(std::size_t k) const {
    double s = 0.0;
    for (std::size_t mask = 0; mask < weights_.size(); ++mask) {
      if (static_cast<std::size_t>(__builtin_popcountll(mask)) == k) s += weights_[mask];
    }
    return s;
  }

  double k_probability(std::size_t mask, std::size_t k) const {
    if (static_cast<std::size_t>(__builtin_popcountll(mask)) != k) return 0.0;
    return weights_[mask] / k_sum(k);
  }

  /// Highest-weight subset among those with cost within budget.
  Subset mode(const Vector& cost, double budget) const {
    std::size_t best = 0;
    for (std::size_t mask = 0; mask < weights_.size(); ++mask) {
      double c = 0.0;
      for (auto i : Subset::from_mask(mask)) c += cost(static_cast<Index>(i));
      if (c <= budget && weights_[mask] > weights_[best]) best = mask;
    }
    return Subset::from_mask(best);
  }

  /// Probability table as a vector over masks.
  std::vector<double> distribution() const {
    std::vector<double> p(weights_.size());
    for (std::size_t i = 0; i < p.size(); ++i) p[i] = weights_[i] / total_;
    return p;
  }

 private:
  std::size_t n_;
  std::vector<double> weights_;
  double total_ = 0.0;
};

inline DppTable enumerate_dpp(const Matrix& l,
                              const EnumerationBudget& budget = EnumerationBudget::from_env()) {
  return DppTable(l, budget);
}

/// Explicit columns B_y = q(y) phi(y) over all M^R structures, indexed so
/// that part 0 varies fastest.
struct StructureEnumeration {
  Matrix b;  // D x M^R
  Matrix l;  // B^T B
  std::vector<Structure> structures;
};

inline StructureEnumeration enumerate_structures(
    const SdppModel& model, const EnumerationBudget& budget = EnumerationBudget::from_env()) {
  const double count = model.structure_count();
  if (count > static_cast<double>(budget.max_structures)) {
    fail(ErrorCode::kOverBudget, "too many structures to enumerate");
  }
  const auto n = static_cast<std::size_t>(count);
  StructureEnumeration out;
  out.b.resize(model.dim(), static_cast<Index>(n));
  for (std::size_t i = 0; i < n; ++i) {
    Structure y = model.decode(i);
    // Independent product/sum over factors, recomputed from the tables.
    double q = 1.0;
    Vector phi = Vector::Zero(model.dim());
    for (std::size_t f = 0; f < model.tree().factor_count(); ++f) {
      std::size_t config = 0, stride = 1;
      for (auto r : model.tree().scope(f)) {
        config += y[r] * stride;
        stride *= model.labels();
      }
      const auto& t = model.tables()[f];
      q *= t.q(static_cast<Index>(config));
      if (t.has_features()) phi += t.phi.col(static_cast<Index>(config));
    }
    out.b.col(static_cast<Index>(i)) = q * phi;
    out.structures.push_back(std::move(y));
  }
  out.l = out.b.transpose() * out.b;
  return out;
}

/// Frequencies of `draws` sampler outputs, keyed by an integer encoding,
/// compared against a reference probability table over the same keys.
struct EmpiricalReport {
  std::map<std::size_t, std::size_t> counts;
  std::size_t draws = 0;
  double tv = 0.0;
  GoodnessOfFit fit;
};

inline EmpiricalReport empirical_distribution(const std::function<std::size_t(Rng&)>& sampler,
                                              std::size_t draws, Rng& rng,
                                              const std::vector<double>& reference) {
  EmpiricalReport out;
  out.draws = draws;
  std::vector<double> observed(reference.size(), 0.0);
  for (std::size_t t = 0; t < draws; ++t) {
    const auto key = sampler(rng);
    ++out.counts[key];
    if (key >= observed.size()) {
      fail(ErrorCode::kInternalDegeneracy, "sampler produced an outcome outside the reference");
    }
    observed[key] += 1.0;
  }
  out.tv = tv_distance(observed, reference);
  out.fit = chi_square_gof(observed, reference);
  return out;
}

}  // namespace dpp
