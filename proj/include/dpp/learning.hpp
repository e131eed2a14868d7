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

// Parameter learning: the log-linear quality model of a conditional DPP
// with fixed diversity, and convex weights for a mixture of k-DPP experts.

#pragma once

#include <deque>
#include <utility>
#include <vector>

#include "dpp/kdpp.hpp"
#include "dpp/parallel.hpp"

namespace dpp {

/// One training example: quality features f (m x N), unit diversity
/// features phi (D x N) and the observed subset.
struct ConditionalInstance {
  Matrix f;
  Matrix phi;
  Subset y;

  std::size_t size() const { return static_cast<std::size_t>(f.cols()); }

  void validate() const {
    if (f.cols() != phi.cols()) {
      fail(ErrorCode::kDimensionMismatch, "quality and diversity features disagree on N");
    }
    if (!y.empty() && y.items().back() >= size()) {
      fail(ErrorCode::kInvalidInput, "label item out of range");
    }
    if (!f.allFinite() || !phi.allFinite()) {
      fail(ErrorCode::kInvalidInput, "non-finite training feature");
    }
    for (Index i = 0; i < phi.cols(); ++i) {
      if (!(phi.col(i).norm() > 0.0)) {
        fail(ErrorCode::kInvalidInput, "zero diversity feature for item " + std::to_string(i));
      }
    }
  }
};

/// Unit columns with an extra constant coordinate rho, renormalized.
inline Matrix augment_constant_feature(const Matrix& phi, double rho) {
  Matrix out(phi.rows() + 1, phi.cols());
  out.topRows(phi.rows()) = phi;
  out.row(phi.rows()).setConstant(rho);
  for (Index i = 0; i < out.cols(); ++i) out.col(i).normalize();
  return out;
}

/// q_i = exp(theta^T f_i / 2).
inline Vector quality_scores(const Vector& theta, const ConditionalInstance& inst) {
  if (theta.size() != inst.f.rows()) {
    fail(ErrorCode::kDimensionMismatch, "theta and quality features disagree on m");
  }
  return (0.5 * (inst.f.transpose() * theta)).array().exp();
}

inline LEnsemble instance_ensemble(const Vector& theta, const ConditionalInstance& inst) {
  const Vector q = quality_scores(theta, inst);
  Matrix phi = inst.phi;
  for (Index i = 0; i < phi.cols(); ++i) phi.col(i).normalize();
  return LEnsemble::from_quality_diversity(QualityDiversity::unnormalized(q, phi));
}

/// False when det(S_Y) = 0, i.e. the label has zero probability for every theta.
inline bool instance_usable(const ConditionalInstance& inst) {
  Matrix phi = inst.phi(Eigen::all, inst.y.indices());
  for (Index i = 0; i < phi.cols(); ++i) phi.col(i).normalize();
  return is_positive_definite(phi.transpose() * phi, 1e-12);
}

struct LearningData {
  std::vector<ConditionalInstance> instances;
  std::vector<std::size_t> dropped;  // indices with det(S_Y) = 0

  static LearningData make(std::vector<ConditionalInstance> all) {
    LearningData out;
    for (std::size_t t = 0; t < all.size(); ++t) {
      all[t].validate();
      if (instance_usable(all[t])) {
        out.instances.push_back(std::move(all[t]));
      } else {
        out.dropped.push_back(t);
      }
    }
    return out;
  }
};

struct ObjectiveOptions {
  /// Gaussian prior: the objective subtracts (l2 / 2) ||theta||^2.
  double l2 = 0.0;
  std::size_t jobs = 1;
};

namespace detail {

struct InstanceTerms {
  double value = 0.0;
  Vector grad;
};

inline InstanceTerms instance_terms(const Vector& theta, const ConditionalInstance& inst,
                                    bool want_grad) {
  const LEnsemble ens = instance_ensemble(theta, inst);
  const auto spec = ens.spectrum();
  InstanceTerms out;
  out.value = log_det_psd(principal_submatrix(ens.matrix(), inst.y)) - normalizer(spec).log_value;
  if (want_grad) {
    // K_ii = sum_n lambda_n / (lambda_n + 1) v_ni^2
    const Vector w = spec.eigenvalues.array() / (spec.eigenvalues.array() + 1.0);
    const Vector kdiag = spec.eigenvectors.array().square().matrix() * w;
    out.grad = -inst.f * kdiag;
    for (auto i : inst.y) out.grad += inst.f.col(static_cast<Index>(i));
  }
  return out;
}

inline InstanceTerms objective_terms(const Vector& theta, const LearningData& data,
                                     const ObjectiveOptions& options, bool want_grad) {
  std::vector<InstanceTerms> parts(data.instances.size());
  parallel_for(parts.size(), options.jobs, [&](std::size_t t) {
    parts[t] = instance_terms(theta, data.instances[t], want_grad);
  });
  InstanceTerms total;
  total.value = -0.5 * options.l2 * theta.squaredNorm();
  if (want_grad) total.grad = -options.l2 * theta;
  for (const auto& p : parts) {
    total.value += p.value;
    if (want_grad) total.grad += p.grad;
  }
  return total;
}

}  // namespace detail

/// sum_t [log det(L_{Y_t}) - log det(L_t + I)] (minus the optional prior).
inline double log_likelihood(const Vector& theta, const LearningData& data,
                             const ObjectiveOptions& options = {}) {
  return detail::objective_terms(theta, data, options, false).value;
}

/// sum_t [sum_{i in Y_t} f_i - sum_i K_ii f_i] (minus l2 theta).
inline Vector gradient(const Vector& theta, const LearningData& data,
                       const ObjectiveOptions& options = {}) {
  return detail::objective_terms(theta, data, options, true).grad;
}

enum class Optimizer { kGradientAscent, kLbfgs };

struct TrainOptions {
  ObjectiveOptions objective;
  Optimizer optimizer = Optimizer::kGradientAscent;
  double tol = 1e-6;  // on ||gradient||_inf
  std::size_t max_iterations = 2000;
  std::size_t lbfgs_memory = 8;
};

struct TrainResult {
  Vector theta;
  double objective = 0.0;
  double grad_norm = 0.0;
  std::size_t iterations = 0;
  bool converged = false;
  std::vector<double> trace;  // objective after every accepted step
};

/// Maximizes the concave log-likelihood. Each accepted step satisfies an
/// Armijo sufficient-increase condition, so the objective never decreases.
/// Gradient ascent starts each line search from a Barzilai-Borwein step.
inline TrainResult train_quality(const LearningData& data, Vector theta,
                                 const TrainOptions& options = {}) {
  auto eval = [&](const Vector& t) {
    detail::InstanceTerms terms;
    try {
      terms = detail::objective_terms(t, data, options.objective, true);
    } catch (const Error& e) {
      // Overflowing qualities surface as invalid kernels.
      if (e.code() != ErrorCode::kInvalidInput) throw;
      fail(ErrorCode::kDiverged, std::string("objective became non-finite (") + e.what() + ")");
    }
    if (!std::isfinite(terms.value) || !terms.grad.allFinite()) {
      fail(ErrorCode::kDiverged, "objective became non-finite");
    }
    return terms;
  };
  TrainResult out;
  auto cur = eval(theta);
  out.trace.push_back(cur.value);
  double step = 1.0 / std::max(1.0, static_cast<double>(data.instances.size()));
  std::deque<std::pair<Vector, Vector>> memory;  // (s, y) pairs for L-BFGS

  for (out.iterations = 0; out.iterations < options.max_iterations; ++out.iterations) {
    if (cur.grad.lpNorm<Eigen::Infinity>() <= options.tol) {
      out.converged = true;
      break;
    }
    Vector dir = cur.grad;
    double t = step;
    if (options.optimizer == Optimizer::kLbfgs && !memory.empty()) {
      // Two-loop recursion on the negated objective.
      Vector qv = -cur.grad;
      std::vector<double> alpha(memory.size());
      for (std::size_t j = memory.size(); j-- > 0;) {
        const auto& [s, y] = memory[j];
        alpha[j] = s.dot(qv) / y.dot(s);
        qv -= alpha[j] * y;
      }
      const auto& [s_last, y_last] = memory.back();
      qv *= s_last.dot(y_last) / y_last.squaredNorm();
      for (std::size_t j = 0; j < memory.size(); ++j) {
        const auto& [s, y] = memory[j];
        const double beta = y.dot(qv) / y.dot(s);
        qv += (alpha[j] - beta) * s;
      }
      dir = -qv;
      t = 1.0;
      if (!(dir.dot(cur.grad) > 0.0)) {
        memory.clear();
        dir = cur.grad;
        t = step;
      }
    }
    const double slope = dir.dot(cur.grad);
    detail::InstanceTerms next;
    bool accepted = false;
    for (int tries = 0; tries < 60; ++tries) {
      const Vector cand = theta + t * dir;
      try {
        next = eval(cand);
        if (next.value >= cur.value + 1e-4 * t * slope) {
          accepted = true;
          break;
        }
      } catch (const Error& e) {
        if (e.code() != ErrorCode::kDiverged) throw;
      }
      t *= 0.5;
    }
    if (!accepted) break;  // no ascent possible at working precision
    const Vector new_theta = theta + t * dir;
    if (options.optimizer == Optimizer::kLbfgs) {
      Vector s = new_theta - theta;
      Vector y = cur.grad - next.grad;  // gradient of the negated objective
      if (s.dot(y) > 1e-12 * s.norm() * y.norm()) {
        memory.emplace_back(std::move(s), std::move(y));
        if (memory.size() > options.lbfgs_memory) memory.pop_front();
      }
    } else {
      // Barzilai-Borwein guess for the next trial step; Armijo still decides.
      const Vector s = new_theta - theta;
      const double curv = -s.dot(next.grad - cur.grad);
      step = curv > 0.0 ? s.squaredNorm() / curv : 2.0 * t;
    }
    theta = new_theta;
    cur = std::move(next);
    out.trace.push_back(cur.value);
  }
  out.theta = theta;
  out.objective = cur.value;
  out.grad_norm = cur.grad.lpNorm<Eigen::Infinity>();
  if (!out.converged && out.grad_norm <= options.tol) out.converged = true;
  return out;
}

// Mixtures of k-DPP experts ------------------------------------------------

struct PreferencePair {
  Subset preferred;
  Subset other;
};

/// delta^t_l = -gamma [P^k_l(Y+_t) - P^k_l(Y-_t)], one row per pair.
inline Matrix mixture_deltas(const std::vector<LEnsemble>& experts, std::size_t k,
                             const std::vector<PreferencePair>& pairs, double gamma) {
  Matrix deltas(static_cast<Index>(pairs.size()), static_cast<Index>(experts.size()));
  for (std::size_t l = 0; l < experts.size(); ++l) {
    for (std::size_t t = 0; t < pairs.size(); ++t) {
      const double pos = kdpp_probability(experts[l], pairs[t].preferred, k).value;
      const double neg = kdpp_probability(experts[l], pairs[t].other, k).value;
      deltas(static_cast<Index>(t), static_cast<Index>(l)) = -gamma * (pos - neg);
    }
  }
  return deltas;
}

/// Loss sum_t log(1 + exp(theta^T delta_t)) and its gradient
/// sum_t sigma(theta^T delta_t) delta_t.
inline std::pair<double, Vector> mixture_objective_grad(const Vector& theta,
                                                        const Matrix& deltas) {
  if (theta.size() != deltas.cols()) {
    fail(ErrorCode::kDimensionMismatch, "one weight per expert required");
  }
  const Vector z = deltas * theta;
  double loss = 0.0;
  Vector sig(z.size());
  for (Index t = 0; t < z.size(); ++t) {
    const double x = z(t);
    loss += std::max(x, 0.0) + std::log1p(std::exp(-std::abs(x)));
    sig(t) = x >= 0 ? 1.0 / (1.0 + std::exp(-x)) : std::exp(x) / (1.0 + std::exp(x));
  }
  return {loss, deltas.transpose() * sig};
}

/// Euclidean projection onto {theta >= 0, sum theta = 1}.
inline Vector project_simplex(const Vector& v) {
  const Index d = v.size();
  if (d == 0) fail(ErrorCode::kInvalidInput, "cannot project an empty vector");
  if (!v.allFinite()) fail(ErrorCode::kInvalidInput, "non-finite vector");
  std::vector<double> u(v.data(), v.data() + d);
  std::sort(u.begin(), u.end(), std::greater<>());
  double cumsum = 0.0;
  double tau = 0.0;
  for (Index j = 0; j < d; ++j) {
    cumsum += u[static_cast<std::size_t>(j)];
    const double t = (cumsum - 1.0) / static_cast<double>(j + 1);
    if (u[static_cast<std::size_t>(j)] - t > 0.0) tau = t;
  }
  return (v.array() - tau).max(0.0);
}

struct MixtureOptions {
  double tol = 1e-9;  // on the step length
  std::size_t max_iterations = 1000;
};

struct MixtureResult {
  Vector theta;
  double loss = 0.0;
  std::size_t iterations = 0;
  std::vector<double> trace;
};

/// Projected gradient descent from the uniform mixture with a backtracking
/// step that only accepts sufficient decrease.
inline MixtureResult train_mixture(const Matrix& deltas, const MixtureOptions& options = {}) {
  const Index d = deltas.cols();
  if (d == 0) fail(ErrorCode::kInvalidInput, "no experts");
  MixtureResult out;
  out.theta = Vector::Constant(d, 1.0 / static_cast<double>(d));
  auto [loss, grad] = mixture_objective_grad(out.theta, deltas);
  out.trace.push_back(loss);
  double t = 1.0;
  for (out.iterations = 0; out.iterations < options.max_iterations; ++out.iterations) {
    bool accepted = false;
    Vector cand;
    double cand_loss = 0.0;
    for (int tries = 0; tries < 60; ++tries) {
      cand = project_simplex(out.theta - t * grad);
      const Vector diff = cand - out.theta;
      cand_loss = mixture_objective_grad(cand, deltas).first;
      if (cand_loss <= loss + grad.dot(diff) + diff.squaredNorm() / (2.0 * t)) {
        accepted = true;
        break;
      }
      t *= 0.5;
    }
    const double moved = (cand - out.theta).norm();
    if (!accepted || cand_loss > loss) break;
    out.theta = cand;
    std::tie(loss, grad) = mixture_objective_grad(out.theta, deltas);
    out.trace.push_back(loss);
    t *= 2.0;
    if (moved <= options.tol) break;
  }
  out.loss = loss;
  return out;
}

}  // namespace dpp
