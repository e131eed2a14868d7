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

// Exact inference for unstructured DPPs: normalization, set likelihoods,
// marginals, conditioning, spectral sampling, cardinality statistics and
// the greedy / MMR / MBR decoders.

#pragma once

#include <functional>
#include <optional>
#include <vector>

#include "dpp/kernel.hpp"
#include "dpp/rng.hpp"

namespace dpp {

/// det(L + I) = prod_n (lambda_n + 1), carried in log form.
inline LogValue normalizer(const SpectralDecomposition& spec) {
  double s = 0.0;
  for (Index i = 0; i < spec.eigenvalues.size(); ++i) s += std::log1p(spec.eigenvalues(i));
  return LogValue::from_log(s);
}

inline LogValue normalizer(const LEnsemble& ensemble) {
  return normalizer(ensemble.spectrum());
}

enum class LikelihoodFormula {
  kLRatio,   // det(L_Y) / det(L + I)
  kKMixed,   // det(I_Y K + I_{~Y} (I - K))
  kKSigned,  // |det(K - I_{~Y})|
};

namespace detail {

inline Probability probability_from_linear(double v) {
  if (!(v > 0.0)) return {kNegInf, 0.0};
  return {std::log(v), v};
}

/// K = I - (L + I)^{-1}.
inline Matrix marginal_from_l(const Matrix& l) {
  const Index n = l.rows();
  const Matrix id = Matrix::Identity(n, n);
  return id - Eigen::LLT<Matrix>(l + id).solve(id);
}

}  // namespace detail

inline Probability set_probability(const LEnsemble& ensemble, const Subset& y,
                                   LikelihoodFormula formula = LikelihoodFormula::kLRatio) {
  const Matrix& l = ensemble.matrix();
  const std::size_t n = ensemble.size();
  if (!y.empty() && y.items().back() >= n) {
    fail(ErrorCode::kInvalidInput, "subset item out of range");
  }
  switch (formula) {
    case LikelihoodFormula::kLRatio: {
      const double num = log_det_psd(principal_submatrix(l, y));
      if (num == kNegInf) return {kNegInf, 0.0};
      return Probability::from_log(num - normalizer(ensemble).log_value);
    }
    case LikelihoodFormula::kKMixed: {
      const Matrix k = detail::marginal_from_l(l);
      Matrix m = Matrix::Identity(l.rows(), l.cols()) - k;
      for (auto i : y) m.row(static_cast<Index>(i)) = k.row(static_cast<Index>(i));
      return detail::probability_from_linear(det_general(m));
    }
    case LikelihoodFormula::kKSigned: {
      Matrix m = detail::marginal_from_l(l);
      for (std::size_t i = 0; i < n; ++i) {
        if (!y.contains(i)) m(static_cast<Index>(i), static_cast<Index>(i)) -= 1.0;
      }
      return detail::probability_from_linear(std::abs(det_general(m)));
    }
  }
  return {kNegInf, 0.0};
}

/// P(A subset of Y) = det(K_A).
inline Probability marginal(const MarginalKernel& k, const Subset& a) {
  return detail::probability_from_linear(
      a.empty() ? 1.0 : det_general(principal_submatrix(k.matrix(), a)));
}

/// P(A and Y disjoint) = det(I - K_A).
inline Probability complement_marginal(const MarginalKernel& k, const Subset& a) {
  if (a.empty()) return {0.0, 1.0};
  const Matrix ka = principal_submatrix(k.matrix(), a);
  return detail::probability_from_linear(
      det_general(Matrix::Identity(ka.rows(), ka.cols()) - ka));
}

struct ConditionSpec {
  Subset include;
  Subset exclude;

  void validate(std::size_t n) const {
    for (auto i : include) {
      if (exclude.contains(i)) {
        fail(ErrorCode::kInvalidInput,
             "item " + std::to_string(i) + " is both included and excluded");
      }
      if (i >= n) fail(ErrorCode::kInvalidInput, "include item out of range");
    }
    for (auto i : exclude) {
      if (i >= n) fail(ErrorCode::kInvalidInput, "exclude item out of range");
    }
  }
};

namespace detail {

inline void require_positive_inclusion(const Matrix& l, const Subset& include) {
  if (include.empty()) return;
  if (!is_positive_definite(principal_submatrix(l, include), 1e-12)) {
    fail(ErrorCode::kZeroProbabilityCondition,
         "the conditioning set has zero probability of appearing");
  }
}

}  // namespace detail

/// P(include subset of Y, exclude disjoint from Y)
///   = det(K_A) det(I - K^A_B),  K^A = I - [(L + I_{~A})^{-1}]_{~A}.
inline Probability partial_marginal(const LEnsemble& ensemble, const ConditionSpec& spec) {
  const std::size_t n = ensemble.size();
  spec.validate(n);
  const Matrix& l = ensemble.matrix();
  detail::require_positive_inclusion(l, spec.include);
  const Index nn = static_cast<Index>(n);
  double log_p = 0.0;
  if (!spec.include.empty()) {
    const Matrix k = detail::marginal_from_l(l);
    const double det_ka = det_general(principal_submatrix(k, spec.include));
    if (!(det_ka > 0.0)) {
      fail(ErrorCode::kZeroProbabilityCondition,
           "the conditioning set has zero probability of appearing");
    }
    log_p += std::log(det_ka);
  }
  if (!spec.exclude.empty()) {
    Matrix m = l;
    for (Index i = 0; i < nn; ++i) {
      if (!spec.include.contains(static_cast<std::size_t>(i))) m(i, i) += 1.0;
    }
    const Matrix inv = m.partialPivLu().inverse();
    // I - K^A_B = [(L + I_{~A})^{-1}]_B for B disjoint from A.
    const double det_b = det_general(principal_submatrix(symmetrized(inv), spec.exclude));
    if (!(det_b > 0.0)) return {kNegInf, 0.0};
    log_p += std::log(det_b);
  }
  return Probability::from_log(log_p);
}

/// Kernel of the conditional DPP over the items that were neither included
/// nor excluded; `items[j]` is the original index of conditional item j.
struct ConditionalEnsemble {
  LEnsemble ensemble;
  std::vector<std::size_t> items;

  Subset to_original(const Subset& local) const {
    std::vector<std::size_t> out;
    for (auto j : local) out.push_back(items[j]);
    return Subset(std::move(out));
  }
};

inline ConditionalEnsemble condition(const LEnsemble& ensemble, const ConditionSpec& spec) {
  const std::size_t n = ensemble.size();
  spec.validate(n);
  const Matrix& l = ensemble.matrix();
  const Subset keep = complement(spec.exclude, n);
  std::vector<std::size_t> rest;
  for (auto i : keep) {
    if (!spec.include.contains(i)) rest.push_back(i);
  }
  ConditionalEnsemble out;
  out.items = rest;
  if (spec.include.empty()) {
    out.ensemble = LEnsemble::unchecked(principal_submatrix(l, keep));
    return out;
  }
  detail::require_positive_inclusion(l, spec.include);
  if (rest.empty()) {
    out.ensemble = LEnsemble::unchecked(Matrix(0, 0));
    return out;
  }
  // L^A = ([(L_keep + I_rest)^{-1}]_rest)^{-1} - I, in keep-local indices.
  Matrix m = principal_submatrix(l, keep);
  std::vector<Index> rest_local;
  for (std::size_t j = 0; j < keep.size(); ++j) {
    if (!spec.include.contains(keep[j])) {
      m(static_cast<Index>(j), static_cast<Index>(j)) += 1.0;
      rest_local.push_back(static_cast<Index>(j));
    }
  }
  const Matrix inv = symmetrized(m.partialPivLu().inverse());
  const Matrix block = inv(rest_local, rest_local);
  Eigen::LLT<Matrix> llt(block);
  if (llt.info() != Eigen::Success) {
    fail(ErrorCode::kZeroProbabilityCondition, "conditioning kernel is singular");
  }
  const Index r = block.rows();
  Matrix la = llt.solve(Matrix::Identity(r, r)) - Matrix::Identity(r, r);
  // Exact arithmetic gives a PSD result; clamp rounding-level negatives.
  SpectralDecomposition spec_la = SpectralDecomposition::of(symmetrized(la), false);
  for (Index i = 0; i < spec_la.eigenvalues.size(); ++i) {
    spec_la.eigenvalues(i) = std::max(0.0, spec_la.eigenvalues(i));
  }
  out.ensemble = LEnsemble::unchecked(spec_la.reconstruct());
  return out;
}

namespace detail {

/// Modified Gram-Schmidt on the columns of `v`, repeating the projection
/// for a column whose norm shrinks below `reorth` of its pre-projection
/// value.
template <class InnerProduct>
void orthonormalize_columns(Matrix& v, InnerProduct inner, double reorth = 0.7071067811865476) {
  for (Index c = 0; c < v.cols(); ++c) {
    double before = std::sqrt(std::max(0.0, inner(v.col(c), v.col(c))));
    for (int pass = 0; pass < 2; ++pass) {
      for (Index p = 0; p < c; ++p) v.col(c) -= inner(v.col(p), v.col(c)) * v.col(p);
      const double after = std::sqrt(std::max(0.0, inner(v.col(c), v.col(c))));
      if (after >= reorth * before) break;
      before = after;
    }
    const double norm = std::sqrt(std::max(0.0, inner(v.col(c), v.col(c))));
    if (!(norm > 1e-300)) {
      fail(ErrorCode::kInternalDegeneracy, "orthonormalization lost rank");
    }
    v.col(c) /= norm;
  }
}

inline void remove_column(Matrix& v, Index j) {
  const Index k = v.cols();
  if (j < k - 1) v.block(0, j, v.rows(), k - 1 - j) = v.rightCols(k - 1 - j).eval();
  v.conservativeResize(Eigen::NoChange, k - 1);
}

}  // namespace detail

/// Second phase of spectral sampling: draws |V| items from the elementary
/// DPP spanned by the orthonormal columns of `v`. Items are returned in
/// selection order.
inline std::vector<std::size_t> sample_elementary(Matrix v, Rng& rng) {
  std::vector<std::size_t> order;
  const auto dot = [](const auto& a, const auto& b) { return a.dot(b); };
  std::vector<double> probs(static_cast<std::size_t>(v.rows()));
  while (v.cols() > 0) {
    for (Index i = 0; i < v.rows(); ++i) probs[static_cast<std::size_t>(i)] = v.row(i).squaredNorm();
    const auto item = rng.discrete(probs);
    const Index i = static_cast<Index>(item);
    order.push_back(item);
    Index pivot = 0;
    v.row(i).cwiseAbs().maxCoeff(&pivot);
    const Vector pv = v.col(pivot);
    for (Index c = 0; c < v.cols(); ++c) {
      if (c != pivot) v.col(c) -= (v(i, c) / pv(i)) * pv;
    }
    detail::remove_column(v, pivot);
    v.row(i).setZero();
    detail::orthonormalize_columns(v, dot);
  }
  return order;
}

/// Indices n selected independently with probability lambda_n/(lambda_n+1).
inline std::vector<Index> sample_eigen_indices(const Vector& eigenvalues, Rng& rng) {
  std::vector<Index> chosen;
  for (Index n = 0; n < eigenvalues.size(); ++n) {
    const double lam = eigenvalues(n);
    if (rng.bernoulli(lam / (lam + 1.0))) chosen.push_back(n);
  }
  return chosen;
}

/// Exact DPP sample with items in the order the sampler emitted them.
inline std::vector<std::size_t> sample_ordered(const SpectralDecomposition& spec, Rng& rng) {
  const auto chosen = sample_eigen_indices(spec.eigenvalues, rng);
  if (chosen.empty()) return {};
  return sample_elementary(spec.eigenvectors(Eigen::all, chosen), rng);
}

inline Subset sample(const SpectralDecomposition& spec, Rng& rng) {
  return Subset(sample_ordered(spec, rng));
}

struct CardinalityMoments {
  double mean = 0.0;
  double variance = 0.0;
  Vector bernoulli_probs;
};

inline CardinalityMoments cardinality_moments(const SpectralDecomposition& spec) {
  CardinalityMoments out;
  out.bernoulli_probs = spec.eigenvalues.array() / (spec.eigenvalues.array() + 1.0);
  out.mean = out.bernoulli_probs.sum();
  out.variance = (out.bernoulli_probs.array() * (1.0 - out.bernoulli_probs.array())).sum();
  return out;
}

struct GreedyOptions {
  /// Stop once no feasible item increases P(Y). When false the loop keeps
  /// adding the best-ratio item until nothing fits in the budget.
  bool stop_when_no_gain = true;
};

struct GreedyResult {
  Subset items;
  std::vector<std::size_t> order;
  double log_det = 0.0;  // log det(L_Y); -inf once Y is singular
  double total_cost = 0.0;
};

/// Budgeted greedy MAP: repeatedly adds the item maximizing
/// (P(Y + i) - P(Y)) / cost_i. Marginal gains come from Schur complements
/// d_i = L_ii - c_i^T c_i maintained by rank-one Cholesky updates.
inline GreedyResult greedy_map(const LEnsemble& ensemble, const Vector& cost, double budget,
                               GreedyOptions options = {}) {
  const Matrix& l = ensemble.matrix();
  const Index n = l.rows();
  if (cost.size() != n) fail(ErrorCode::kDimensionMismatch, "one cost per item required");
  for (Index i = 0; i < n; ++i) {
    if (!(cost(i) > 0.0)) fail(ErrorCode::kInvalidInput, "costs must be positive");
  }
  GreedyResult out;
  std::vector<bool> selected(static_cast<std::size_t>(n), false);
  Vector schur = l.diagonal();
  Matrix chol_rows = Matrix::Zero(n, 0);  // row i holds c_i
  bool singular = false;
  double remaining = budget;

  const auto recompute = [&] {
    const Subset y(out.order);
    const Matrix ly = principal_submatrix(l, y);
    Eigen::LLT<Matrix> llt(ly);
    chol_rows = Matrix::Zero(n, static_cast<Index>(y.size()));
    if (llt.info() != Eigen::Success) {
      singular = true;
      return;
    }
    // Columns ordered as in out.order so later rank-one updates line up.
    std::vector<Index> ord(out.order.begin(), out.order.end());
    Eigen::LLT<Matrix> llt_ord(l(ord, ord));
    const Matrix lo = llt_ord.matrixL();
    for (Index i = 0; i < n; ++i) {
      const Vector rhs = l(ord, std::vector<Index>{i});
      const Vector c = lo.triangularView<Eigen::Lower>().solve(rhs);
      chol_rows.row(i) = c.transpose();
      schur(i) = l(i, i) - c.squaredNorm();
    }
  };

  while (true) {
    Index best = -1;
    double best_score = 0.0;
    for (Index i = 0; i < n; ++i) {
      if (selected[static_cast<std::size_t>(i)] || cost(i) > remaining) continue;
      const double score = singular ? 0.0 : (schur(i) - 1.0) / cost(i);
      if (best < 0 || score > best_score) {
        best = i;
        best_score = score;
      }
    }
    if (best < 0) break;
    if (options.stop_when_no_gain && !(best_score > 0.0)) break;

    const auto j = static_cast<std::size_t>(best);
    selected[j] = true;
    out.order.push_back(j);
    remaining -= cost(best);
    out.total_cost += cost(best);
    if (singular) continue;
    const double dj = schur(best);
    if (!(dj > 1e-12 * std::max(1.0, l(best, best)))) {
      singular = true;
      out.log_det = kNegInf;
      continue;
    }
    out.log_det += std::log(dj);
    const double sd = std::sqrt(dj);
    const Index k = chol_rows.cols();
    Vector e(n);
    for (Index i = 0; i < n; ++i) {
      e(i) = (l(best, i) - chol_rows.row(best).dot(chol_rows.row(i))) / sd;
    }
    chol_rows.conservativeResize(Eigen::NoChange, k + 1);
    chol_rows.col(k) = e;
    bool breakdown = false;
    for (Index i = 0; i < n; ++i) {
      schur(i) -= e(i) * e(i);
      if (!selected[static_cast<std::size_t>(i)] &&
          schur(i) < -1e-9 * std::max(1.0, l(i, i))) {
        breakdown = true;
      }
    }
    if (breakdown) recompute();
  }
  out.items = Subset(out.order);
  if (!singular && !out.items.empty()) {
    out.log_det = log_det_psd(principal_submatrix(l, out.items));
  }
  return out;
}

/// Maximum marginal relevance: argmax alpha q_i - (1 - alpha) max_{j in Y} S_ij
/// until no unselected item fits the remaining budget.
inline Subset mmr_select(const Matrix& s, const Vector& q, double alpha, const Vector& cost,
                         double budget) {
  const Index n = s.rows();
  if (q.size() != n || cost.size() != n) {
    fail(ErrorCode::kDimensionMismatch, "MMR inputs disagree on the number of items");
  }
  std::vector<std::size_t> chosen;
  std::vector<bool> selected(static_cast<std::size_t>(n), false);
  Vector max_sim = Vector::Constant(n, kNegInf);
  double remaining = budget;
  while (true) {
    Index best = -1;
    double best_score = 0.0;
    for (Index i = 0; i < n; ++i) {
      if (selected[static_cast<std::size_t>(i)] || cost(i) > remaining) continue;
      const double redundancy = chosen.empty() ? 0.0 : max_sim(i);
      const double score = alpha * q(i) - (1.0 - alpha) * redundancy;
      if (best < 0 || score > best_score) {
        best = i;
        best_score = score;
      }
    }
    if (best < 0) break;
    selected[static_cast<std::size_t>(best)] = true;
    chosen.push_back(static_cast<std::size_t>(best));
    remaining -= cost(best);
    for (Index i = 0; i < n; ++i) max_sim(i) = std::max(max_sim(i), s(i, best));
  }
  return Subset(std::move(chosen));
}

inline double jaccard(const Subset& a, const Subset& b) {
  if (a.empty() && b.empty()) return 1.0;
  std::size_t inter = 0;
  for (auto i : a) inter += b.contains(i) ? 1 : 0;
  return static_cast<double>(inter) / static_cast<double>(a.size() + b.size() - inter);
}

struct LengthWindow {
  double min_length = 0.0;
  double max_length = std::numeric_limits<double>::infinity();
  /// Defaults to the cardinality of the set.
  std::function<double(const Subset&)> length;

  bool admits(const Subset& y) const {
    const double len = length ? length(y) : static_cast<double>(y.size());
    return len >= min_length && len <= max_length;
  }
};

struct MbrOptions {
  std::size_t samples = 100;
  std::function<double(const Subset&, const Subset&)> similarity = jaccard;
  std::optional<LengthWindow> window;
  /// Redraws allowed per sample before giving up on the window.
  std::size_t max_retries = 1000;
};

/// Minimum Bayes risk decoding over R model samples: returns the sample with
/// the highest mean similarity to all R samples (ties to the earliest).
inline Subset mbr_decode(const std::function<Subset(Rng&)>& sampler, const MbrOptions& options,
                         Rng& rng) {
  if (options.samples == 0) fail(ErrorCode::kInvalidInput, "MBR needs at least one sample");
  std::vector<Subset> pool;
  pool.reserve(options.samples);
  for (std::size_t r = 0; r < options.samples; ++r) {
    std::size_t attempts = 0;
    while (true) {
      Subset y = sampler(rng);
      if (!options.window || options.window->admits(y)) {
        pool.push_back(std::move(y));
        break;
      }
      if (++attempts >= options.max_retries) {
        fail(ErrorCode::kInfeasibleWindow,
             "no sample inside the length window after " + std::to_string(attempts) +
                 " draws");
      }
    }
  }
  std::size_t best = 0;
  double best_score = kNegInf;
  for (std::size_t a = 0; a < pool.size(); ++a) {
    double score = 0.0;
    for (const auto& other : pool) score += options.similarity(pool[a], other);
    score /= static_cast<double>(pool.size());
    if (score > best_score) {
      best_score = score;
      best = a;
    }
  }
  return pool[best];
}

}  // namespace dpp
