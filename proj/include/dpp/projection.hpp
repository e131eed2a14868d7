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

// Gaussian random projections of diversity features and the exact L1
// distance between cardinality-restricted DPPs.

#pragma once

#include <string>
#include <vector>

#include "dpp/oracle.hpp"
#include "dpp/parallel.hpp"
#include "dpp/sdpp.hpp"

namespace dpp {

/// max{2k/eps, (24/eps^2)(log(3/delta)/log N + 1)(log N + 1) + k - 1} with
/// natural logarithms, before rounding.
inline double projection_dim_real(std::size_t k, double eps, double delta, std::size_t n) {
  if (!(eps > 0.0 && eps < 0.5) || !(delta > 0.0 && delta < 0.5)) {
    fail(ErrorCode::kInvalidInput, "epsilon and delta must lie in (0, 1/2)");
  }
  if (k >= n) fail(ErrorCode::kInvalidInput, "k must be smaller than N");
  if (n < 2) fail(ErrorCode::kInvalidInput, "N must be at least 2");
  const double kk = static_cast<double>(k);
  const double logn = std::log(static_cast<double>(n));
  const double first = 2.0 * kk / eps;
  const double second =
      24.0 / (eps * eps) * (std::log(3.0 / delta) / logn + 1.0) * (logn + 1.0) + kk - 1.0;
  return std::max(first, second);
}

inline std::size_t projection_dim(std::size_t k, double eps, double delta, std::size_t n) {
  return static_cast<std::size_t>(std::ceil(projection_dim_real(k, eps, delta, n)));
}

/// d x D matrix with independent N(0, 1/d) entries, filled row by row from
/// a stream seeded with `seed`.
struct ProjectionMatrix {
  Matrix g;
  std::uint64_t seed = 0;
  std::string algorithm;

  static ProjectionMatrix draw(Index d, Index big_d, std::uint64_t seed) {
    if (d <= 0 || big_d <= 0) fail(ErrorCode::kInvalidInput, "projection dimensions must be positive");
    Rng rng(seed);
    ProjectionMatrix out{Matrix(d, big_d), seed, std::string(Rng::kAlgorithm)};
    const double sd = 1.0 / std::sqrt(static_cast<double>(d));
    for (Index i = 0; i < d; ++i) {
      for (Index j = 0; j < big_d; ++j) out.g(i, j) = sd * rng.normal();
    }
    return out;
  }

  Index rows() const { return g.rows(); }
  Index cols() const { return g.cols(); }
};

inline Matrix project_features(const ProjectionMatrix& p, const Matrix& phi) {
  if (phi.rows() != p.cols()) fail(ErrorCode::kDimensionMismatch, "projection expects D rows");
  return p.g * phi;
}

/// Quality is untouched; only the diversity features change.
inline QualityDiversity project_features(const ProjectionMatrix& p, const QualityDiversity& qd) {
  return QualityDiversity::unnormalized(qd.quality, project_features(p, qd.features));
}

/// Projects every factor's feature table.
inline SdppModel project_features(const ProjectionMatrix& p, const SdppModel& model) {
  if (model.dim() != p.cols()) fail(ErrorCode::kDimensionMismatch, "projection expects D rows");
  std::vector<FactorTable> tables = model.tables();
  for (auto& t : tables) {
    t.phi = t.has_features() ? Matrix(p.g * t.phi) : Matrix(p.rows(), 0);
  }
  return SdppModel(model.tree(), std::move(tables), p.rows(), false);
}

enum class CardinalityRestriction { kAtMost, kExactly };

namespace detail {

/// Calls fn(subset) for every subset of {0..n-1} of size k in lexicographic order.
template <class Fn>
void for_each_combination(std::size_t n, std::size_t k, Fn&& fn) {
  if (k > n) return;
  std::vector<std::size_t> idx(k);
  for (std::size_t i = 0; i < k; ++i) idx[i] = i;
  while (true) {
    fn(idx);
    std::size_t i = k;
    while (i > 0 && idx[i - 1] == n - k + i - 1) --i;
    if (i == 0) return;
    ++idx[i - 1];
    for (std::size_t j = i; j < k; ++j) idx[j] = idx[j - 1] + 1;
  }
}

inline double binomial(std::size_t n, std::size_t k) {
  double r = 1.0;
  for (std::size_t i = 1; i <= k; ++i) r = r * static_cast<double>(n - k + i) / static_cast<double>(i);
  return r;
}

}  // namespace detail

/// Exact L1 distance between the two DPPs restricted to |Y| <= k (or
/// |Y| = k), by enumeration.
inline double l1_distance_exact(const Matrix& la, const Matrix& lb, std::size_t k,
                                CardinalityRestriction mode = CardinalityRestriction::kAtMost,
                                const EnumerationBudget& budget = EnumerationBudget::from_env()) {
  if (la.rows() != lb.rows()) fail(ErrorCode::kDimensionMismatch, "models differ in N");
  const auto n = static_cast<std::size_t>(la.rows());
  const std::size_t lo = mode == CardinalityRestriction::kExactly ? k : 0;
  double count = 0.0;
  for (std::size_t j = lo; j <= std::min(k, n); ++j) count += detail::binomial(n, j);
  if (count > static_cast<double>(budget.max_subsets)) {
    fail(ErrorCode::kOverBudget, "too many subsets for exact L1; use the sampling estimate");
  }
  std::vector<double> wa, wb;
  for (std::size_t j = lo; j <= std::min(k, n); ++j) {
    detail::for_each_combination(n, j, [&](const std::vector<std::size_t>& idx) {
      const std::vector<Index> ii(idx.begin(), idx.end());
      wa.push_back(std::max(0.0, oracle_det(la(ii, ii))));
      wb.push_back(std::max(0.0, oracle_det(lb(ii, ii))));
    });
  }
  const double za = std::accumulate(wa.begin(), wa.end(), 0.0);
  const double zb = std::accumulate(wb.begin(), wb.end(), 0.0);
  if (!(za > 0.0) || !(zb > 0.0)) fail(ErrorCode::kInfeasibleCardinality, "no mass at cardinality <= k");
  double s = 0.0;
  for (std::size_t i = 0; i < wa.size(); ++i) s += std::abs(wa[i] / za - wb[i] / zb);
  return s;
}

inline double l1_distance_exact(const QualityDiversity& a, const QualityDiversity& b, std::size_t k,
                                CardinalityRestriction mode = CardinalityRestriction::kAtMost) {
  const Matrix ba = a.columns();
  const Matrix bb = b.columns();
  return l1_distance_exact(Matrix(ba.transpose() * ba), Matrix(bb.transpose() * bb), k, mode);
}

struct L1Estimate {
  double estimate = 0.0;
  double std_error = 0.0;
  std::size_t draws = 0;
};

/// Importance-weighted estimate of the L1 distance between two k-SDPPs,
/// E_{Y ~ P^k}|1 - P~^k(Y)/P^k(Y)|, with samples drawn from `original`.
inline L1Estimate l1_distance_estimate(const SdppModel& original, const SdppModel& projected,
                                       std::size_t k, std::size_t draws, Rng& rng) {
  const Matrix ca = compute_dual_c(original);
  const Matrix cb = compute_dual_c(projected);
  const auto ea = DualEigenbasis::of(ca);
  const LogValue za = kdpp_normalizer(truncated_spectrum(ea.eigenvalues), k);
  const LogValue zb = kdpp_normalizer(truncated_spectrum(SpectralDecomposition::of(cb).eigenvalues), k);
  if (za.log_value == kNegInf || zb.log_value == kNegInf) {
    fail(ErrorCode::kInfeasibleCardinality, "e_k is zero");
  }
  std::vector<double> terms;
  for (std::size_t t = 0; t < draws; ++t) {
    const auto ys = ksdpp_sample(original, ca, ea, k, rng);
    Matrix ba(original.dim(), static_cast<Index>(ys.size()));
    Matrix bb(projected.dim(), static_cast<Index>(ys.size()));
    for (std::size_t i = 0; i < ys.size(); ++i) {
      ba.col(static_cast<Index>(i)) = original.column(ys[i]);
      bb.col(static_cast<Index>(i)) = projected.column(ys[i]);
    }
    const double lda = log_det_psd(ba.transpose() * ba);
    const double ldb = log_det_psd(bb.transpose() * bb);
    const double ratio = ldb == kNegInf ? 0.0 : std::exp(ldb - zb.log_value - lda + za.log_value);
    terms.push_back(std::abs(1.0 - ratio));
  }
  L1Estimate out;
  out.draws = draws;
  const double n = static_cast<double>(draws);
  out.estimate = std::accumulate(terms.begin(), terms.end(), 0.0) / n;
  double ss = 0.0;
  for (double x : terms) ss += (x - out.estimate) * (x - out.estimate);
  out.std_error = draws > 1 ? std::sqrt(ss / (n - 1.0) / n) : 0.0;
  return out;
}

struct BoundReport {
  std::size_t d = 0;
  double bound = 0.0;  // e^{6 k eps} - 1
  double mean_l1 = 0.0;
  double satisfied_fraction = 0.0;
  std::vector<double> l1;
};

/// Projects `model` with `trials` independent matrices (seeds seed, seed+1,
/// ...) at dimension d (the formula value when d = 0) and checks the L1
/// bound on the |Y| <= k restriction.
inline BoundReport bound_validation(const QualityDiversity& model, std::size_t k, double eps,
                                    double delta, std::size_t trials, std::uint64_t seed,
                                    std::size_t d = 0, std::size_t jobs = 1) {
  BoundReport out;
  out.d = d > 0 ? d : projection_dim(k, eps, delta, model.size());
  out.bound = std::expm1(6.0 * static_cast<double>(k) * eps);
  out.l1.assign(trials, 0.0);
  parallel_for(trials, jobs, [&](std::size_t t) {
    const auto p = ProjectionMatrix::draw(static_cast<Index>(out.d), model.dim(), seed + t);
    out.l1[t] = l1_distance_exact(model, project_features(p, model), k);
  });
  std::size_t ok = 0;
  for (double x : out.l1) {
    out.mean_l1 += x;
    ok += x <= out.bound ? 1 : 0;
  }
  out.mean_l1 /= static_cast<double>(std::max<std::size_t>(trials, 1));
  out.satisfied_fraction = static_cast<double>(ok) / static_cast<double>(std::max<std::size_t>(trials, 1));
  return out;
}

}  // namespace dpp
