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

// Fixed-cardinality DPPs built on elementary symmetric polynomials.

#pragma once

#include <vector>

#include "dpp/inference.hpp"

namespace dpp {

/// e_l of the first n eigenvalues, for l <= k and n <= N. Entries are
/// stored for lambda / lambda_max; value() reapplies the scale in log space.
class EspTable {
 public:
  EspTable() = default;

  static EspTable compute(const Vector& lambda, std::size_t k) {
    EspTable t;
    t.lambda_ = lambda;
    const Index n = lambda.size();
    const double top = n > 0 ? lambda.maxCoeff() : 0.0;
    t.log_scale_ = top > 0.0 ? std::log(top) : 0.0;
    t.scaled_ = top > 0.0 ? Vector(lambda / top) : lambda;
    const Index kk = static_cast<Index>(k);
    t.e_ = Matrix::Zero(kk + 1, n + 1);
    t.e_.row(0).setOnes();
    for (Index l = 1; l <= kk; ++l) {
      for (Index m = 1; m <= n; ++m) {
        t.e_(l, m) = t.e_(l, m - 1) + t.scaled_(m - 1) * t.e_(l - 1, m - 1);
      }
    }
    return t;
  }

  std::size_t max_k() const { return static_cast<std::size_t>(e_.rows() - 1); }
  std::size_t size() const { return static_cast<std::size_t>(lambda_.size()); }
  const Vector& eigenvalues() const { return lambda_; }
  const Vector& scaled_eigenvalues() const { return scaled_; }
  double log_scale() const { return log_scale_; }

  /// e_l over the first n scaled eigenvalues.
  double scaled(std::size_t l, std::size_t n) const {
    return e_(static_cast<Index>(l), static_cast<Index>(n));
  }

  LogValue value(std::size_t l, std::size_t n) const {
    const double s = scaled(l, n);
    if (!(s > 0.0)) return {kNegInf, 0.0};
    return LogValue::from_log(std::log(s) + static_cast<double>(l) * log_scale_);
  }

  /// e_l of the whole spectrum.
  LogValue value(std::size_t l) const { return value(l, size()); }

 private:
  Vector lambda_;
  Vector scaled_;
  double log_scale_ = 0.0;
  Matrix e_;
};

inline EspTable elementary_symmetric(const Vector& lambda, std::size_t k) {
  return EspTable::compute(lambda, k);
}

/// Z_k = e_k(lambda); zero (log -inf) when k exceeds N.
inline LogValue kdpp_normalizer(const Vector& lambda, std::size_t k) {
  if (k > static_cast<std::size_t>(lambda.size())) return {kNegInf, 0.0};
  return EspTable::compute(lambda, k).value(k);
}

inline Probability kdpp_probability(const LEnsemble& ensemble, const Subset& y, std::size_t k) {
  if (y.size() != k) {
    fail(ErrorCode::kCardinalityMismatch,
         "set has " + std::to_string(y.size()) + " items, model draws " + std::to_string(k));
  }
  if (!y.empty() && y.items().back() >= ensemble.size()) {
    fail(ErrorCode::kInvalidInput, "subset item out of range");
  }
  const LogValue z = kdpp_normalizer(ensemble.spectrum().eigenvalues, k);
  if (z.log_value == kNegInf) fail(ErrorCode::kInfeasibleCardinality, "e_k is zero");
  const double num = log_det_psd(principal_submatrix(ensemble.matrix(), y));
  if (num == kNegInf) return {kNegInf, 0.0};
  return Probability::from_log(num - z.log_value);
}

/// Indices J with |J| = k and Pr(J) proportional to prod_{n in J} lambda_n.
inline std::vector<Index> sample_k_eigenvectors(const EspTable& table, std::size_t k, Rng& rng) {
  if (k > table.max_k()) fail(ErrorCode::kInvalidInput, "table does not reach k");
  const std::size_t n = table.size();
  if (k > n || !(table.scaled(k, n) > 0.0)) {
    fail(ErrorCode::kInfeasibleCardinality,
         "no set of size " + std::to_string(k) + " has positive probability");
  }
  std::vector<Index> chosen;
  std::size_t l = k;
  for (std::size_t m = n; m >= 1 && l > 0; --m) {
    const double accept =
        table.scaled_eigenvalues()(static_cast<Index>(m - 1)) * table.scaled(l - 1, m - 1) /
        table.scaled(l, m);
    if (rng.uniform() < accept) {
      chosen.push_back(static_cast<Index>(m - 1));
      --l;
    }
  }
  std::reverse(chosen.begin(), chosen.end());
  return chosen;
}

inline std::vector<Index> sample_k_eigenvectors(const Vector& lambda, std::size_t k, Rng& rng) {
  return sample_k_eigenvectors(EspTable::compute(lambda, k), k, rng);
}

inline std::vector<std::size_t> kdpp_sample_ordered(const SpectralDecomposition& spec,
                                                    std::size_t k, Rng& rng) {
  const auto chosen = sample_k_eigenvectors(spec.eigenvalues, k, rng);
  if (chosen.empty()) return {};
  return sample_elementary(spec.eigenvectors(Eigen::all, chosen), rng);
}

inline Subset kdpp_sample(const SpectralDecomposition& spec, std::size_t k, Rng& rng) {
  return Subset(kdpp_sample_ordered(spec, k, rng));
}

/// A k-DPP obtained by conditioning; `items` maps local to original indices.
struct ConditionalKdpp {
  ConditionalEnsemble conditional;
  std::size_t k = 0;
  LogValue normalizer;  // Z^A_{k - |A|}
};

inline ConditionalKdpp kdpp_condition(const LEnsemble& ensemble, const Subset& a, std::size_t k) {
  if (a.size() > k) {
    fail(ErrorCode::kCardinalityMismatch, "conditioning set is larger than k");
  }
  ConditionalKdpp out;
  out.conditional = condition(ensemble, ConditionSpec{a, {}});
  out.k = k - a.size();
  out.normalizer = kdpp_normalizer(out.conditional.ensemble.spectrum().eigenvalues, out.k);
  return out;
}

/// P(A subset of Y) = Z^A_{k-|A|} det(L_A) / Z_k.
inline Probability kdpp_marginal(const LEnsemble& ensemble, const Subset& a, std::size_t k) {
  if (a.size() > k) return {kNegInf, 0.0};
  if (!a.empty() && a.items().back() >= ensemble.size()) {
    fail(ErrorCode::kInvalidInput, "subset item out of range");
  }
  const LogValue z = kdpp_normalizer(ensemble.spectrum().eigenvalues, k);
  if (z.log_value == kNegInf) fail(ErrorCode::kInfeasibleCardinality, "e_k is zero");
  if (a.empty()) return {0.0, 1.0};
  const Matrix la = principal_submatrix(ensemble.matrix(), a);
  if (!is_positive_definite(la, 1e-12)) return {kNegInf, 0.0};
  const auto cond = kdpp_condition(ensemble, a, k);
  if (cond.normalizer.log_value == kNegInf) return {kNegInf, 0.0};
  return Probability::from_log(cond.normalizer.log_value + log_det_psd(la) - z.log_value);
}

/// Complete binary tree over the (scaled) eigenvalues; every node holds
/// e_0..e_k of the eigenvalues below it. Leaves past N are neutral.
class EspLeaveOneOutTree {
 public:
  using Poly = std::vector<double>;

  static EspLeaveOneOutTree build(const Vector& scaled_lambda, std::size_t k) {
    EspLeaveOneOutTree t;
    t.k_ = k;
    t.n_ = static_cast<std::size_t>(scaled_lambda.size());
    t.leaves_ = 1;
    while (t.leaves_ < std::max<std::size_t>(t.n_, 1)) t.leaves_ *= 2;
    t.nodes_.assign(2 * t.leaves_, neutral(k));
    for (std::size_t i = 0; i < t.n_; ++i) {
      Poly& p = t.nodes_[t.leaves_ + i];
      if (k >= 1) p[1] = scaled_lambda(static_cast<Index>(i));
    }
    for (std::size_t v = t.leaves_ - 1; v >= 1; --v) {
      t.nodes_[v] = merge(t.nodes_[2 * v], t.nodes_[2 * v + 1], k);
    }
    return t;
  }

  /// e_k(A u B) = sum_l e_l(A) e_{k-l}(B), truncated at degree k.
  static Poly merge(const Poly& a, const Poly& b, std::size_t k) {
    Poly out(k + 1, 0.0);
    for (std::size_t i = 0; i <= k; ++i) {
      if (a[i] == 0.0) continue;
      for (std::size_t j = 0; i + j <= k; ++j) out[i + j] += a[i] * b[j];
    }
    return out;
  }

  static Poly neutral(std::size_t k) {
    Poly p(k + 1, 0.0);
    p[0] = 1.0;
    return p;
  }

  const Poly& root() const { return nodes_[1]; }
  const Poly& node(std::size_t v) const { return nodes_[v]; }
  std::size_t leaf_count() const { return leaves_; }

  /// e_0..e_k of every eigenvalue except leaf n, for all n at once:
  /// the complement polynomial of a node is its parent's complement merged
  /// with its sibling.
  std::vector<Poly> leave_one_out() const {
    std::vector<Poly> rest(2 * leaves_);
    rest[1] = neutral(k_);
    for (std::size_t v = 2; v < 2 * leaves_; ++v) {
      rest[v] = merge(rest[v / 2], nodes_[v ^ 1], k_);
    }
    return {rest.begin() + static_cast<std::ptrdiff_t>(leaves_),
            rest.begin() + static_cast<std::ptrdiff_t>(leaves_ + n_)};
  }

 private:
  std::size_t k_ = 0;
  std::size_t n_ = 0;
  std::size_t leaves_ = 1;
  std::vector<Poly> nodes_;
};

/// P(i in Y) = sum_n (v_n^T e_i)^2 lambda_n e_{k-1}^{-n} / e_k.
inline Vector kdpp_singleton_marginals(const SpectralDecomposition& spec, std::size_t k) {
  const Index n = spec.eigenvalues.size();
  if (k > static_cast<std::size_t>(n)) {
    fail(ErrorCode::kInfeasibleCardinality, "k exceeds the number of items");
  }
  if (k == 0) return Vector::Zero(n);
  const double top = spec.eigenvalues.maxCoeff();
  if (!(top > 0.0)) fail(ErrorCode::kInfeasibleCardinality, "e_k is zero");
  const Vector scaled = spec.eigenvalues / top;
  const auto tree = EspLeaveOneOutTree::build(scaled, k);
  const double ek = tree.root()[k];
  if (!(ek > 0.0)) fail(ErrorCode::kInfeasibleCardinality, "e_k is zero");
  const auto loo = tree.leave_one_out();
  Vector weight(n);
  for (Index m = 0; m < n; ++m) {
    weight(m) = scaled(m) * loo[static_cast<std::size_t>(m)][k - 1] / ek;
  }
  return spec.eigenvectors.array().square().matrix() * weight;
}

}  // namespace dpp
