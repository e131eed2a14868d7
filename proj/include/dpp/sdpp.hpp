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

// Structured DPPs: the ground set is every labeling of R parts with M
// labels, q(y) = prod_a q_a(y_a) and phi(y) = sum_a phi_a(y_a) over the
// factors of a tree.

#pragma once

#include <functional>
#include <memory>
#include <vector>

#include "dpp/dual.hpp"
#include "dpp/factor_graph.hpp"
#include "dpp/kdpp.hpp"
#include "dpp/parallel.hpp"

namespace dpp {

using Structure = std::vector<std::size_t>;

/// Per-factor tables. `phi` is D x configs; a 0-column matrix stands for
/// all-zero features.
struct FactorTable {
  Vector q;
  Matrix phi;

  bool has_features() const { return phi.cols() > 0; }
};

class SdppModel {
 public:
  SdppModel() = default;

  /// With `unit_features`, every nonzero feature vector must have unit
  /// norm (within 1e-9, renormalized); projected models pass false.
  SdppModel(FactorTree tree, std::vector<FactorTable> tables, Index dim,
            bool unit_features = true)
      : tree_(std::move(tree)), tables_(std::move(tables)), dim_(dim) {
    if (tables_.size() != tree_.factor_count()) {
      fail(ErrorCode::kDimensionMismatch, "one table per factor required");
    }
    for (std::size_t f = 0; f < tables_.size(); ++f) {
      auto& t = tables_[f];
      const auto configs = static_cast<Index>(tree_.config_count(f));
      const std::string where = "factor " + std::to_string(f);
      if (t.q.size() != configs) fail(ErrorCode::kDimensionMismatch, where + ": quality table size");
      if (!t.q.allFinite() || t.q.minCoeff() < 0.0) {
        fail(ErrorCode::kInvalidInput, where + ": quality must be nonnegative");
      }
      if (!t.has_features()) {
        t.phi.resize(dim_, 0);
        continue;
      }
      if (t.phi.rows() != dim_ || t.phi.cols() != configs) {
        fail(ErrorCode::kDimensionMismatch, where + ": feature table shape");
      }
      if (!t.phi.allFinite()) fail(ErrorCode::kInvalidInput, where + ": non-finite feature");
      if (unit_features) {
        for (Index c = 0; c < configs; ++c) {
          const double norm = t.phi.col(c).norm();
          if (norm == 0.0) continue;
          if (std::abs(norm - 1.0) > 1e-9) {
            fail(ErrorCode::kInvalidInput, where + ": feature vectors must have unit norm");
          }
          t.phi.col(c) /= norm;
        }
      }
    }
  }

  const FactorTree& tree() const { return tree_; }
  const std::vector<FactorTable>& tables() const { return tables_; }
  std::vector<FactorTable>& mutable_tables() { return tables_; }
  Index dim() const { return dim_; }
  std::size_t parts() const { return tree_.parts(); }
  std::size_t labels() const { return tree_.labels(); }

  /// M^R as a double (may be astronomically large).
  double structure_count() const {
    return std::pow(static_cast<double>(labels()), static_cast<double>(parts()));
  }

  double quality(const Structure& y) const {
    double q = 1.0;
    for (std::size_t f = 0; f < tables_.size(); ++f) q *= tables_[f].q(config(f, y));
    return q;
  }

  Vector features(const Structure& y) const {
    Vector phi = Vector::Zero(dim_);
    for (std::size_t f = 0; f < tables_.size(); ++f) {
      if (tables_[f].has_features()) phi += tables_[f].phi.col(config(f, y));
    }
    return phi;
  }

  /// B_y = q(y) phi(y).
  Vector column(const Structure& y) const { return quality(y) * features(y); }

  /// phi_a(config) projected on v, zero for featureless factors.
  double projected_feature(std::size_t f, std::size_t c, const Vector& v) const {
    const auto& t = tables_[f];
    return t.has_features() ? t.phi.col(static_cast<Index>(c)).dot(v) : 0.0;
  }

  Structure decode(std::size_t index) const {
    Structure y(parts());
    for (std::size_t r = 0; r < parts(); ++r) {
      y[r] = index % labels();
      index /= labels();
    }
    return y;
  }

 private:
  Index config(std::size_t f, const Structure& y) const {
    return static_cast<Index>(tree_.encode(f, y));
  }

  FactorTree tree_;
  std::vector<FactorTable> tables_;
  Index dim_ = 0;
};

/// Scalar second-order engine with p = q^2, a = v^T phi, b = u^T phi.
inline MessagePassing<SecondOrderSemiring> second_order_engine(const SdppModel& model,
                                                               const Vector& v, const Vector& u) {
  auto pa = std::make_shared<std::vector<Vector>>();
  auto pb = std::make_shared<std::vector<Vector>>();
  for (std::size_t f = 0; f < model.tree().factor_count(); ++f) {
    const auto& t = model.tables()[f];
    if (t.has_features()) {
      pa->push_back(t.phi.transpose() * v);
      pb->push_back(t.phi.transpose() * u);
    } else {
      pa->push_back(Vector::Zero(t.q.size()));
      pb->push_back(Vector::Zero(t.q.size()));
    }
  }
  const SdppModel* m = &model;
  return MessagePassing<SecondOrderSemiring>(
      model.tree(), SecondOrderSemiring{},
      [m, pa, pb](std::size_t f, std::size_t c) {
        const Index i = static_cast<Index>(c);
        const double q = m->tables()[f].q(i);
        return SecondOrder::weight(q * q, (*pa)[f](i), (*pb)[f](i));
      });
}

/// Sum-product engine with weights q_a^2.
inline MessagePassing<SumProduct> quality_engine(const SdppModel& model) {
  const SdppModel* m = &model;
  return MessagePassing<SumProduct>(model.tree(), SumProduct{}, [m](std::size_t f, std::size_t c) {
    const double q = m->tables()[f].q(static_cast<Index>(c));
    return q * q;
  });
}

enum class DualCMethod {
  kVectorized,  // one pass of the vectorized second-order semiring
  kScalar,      // D(D+1)/2 scalar second-order passes
  kPairwise,    // sum over factor pairs of clamped sum-product marginals
};

/// C = sum_y q(y)^2 phi(y) phi(y)^T.
inline Matrix compute_dual_c(const SdppModel& model, DualCMethod method = DualCMethod::kVectorized,
                             std::size_t jobs = 1) {
  const Index d = model.dim();
  const FactorTree& tree = model.tree();
  switch (method) {
    case DualCMethod::kVectorized: {
      VectorSecondOrderSemiring sr{d};
      const SdppModel* m = &model;
      MessagePassing<VectorSecondOrderSemiring> bp(
          tree, sr, [m, sr, d](std::size_t f, std::size_t c) {
            const auto& t = m->tables()[f];
            const Index i = static_cast<Index>(c);
            const double p = t.q(i) * t.q(i);
            if (!t.has_features()) return SecondOrderVec{p, Vector::Zero(d), Vector::Zero(d), Matrix::Zero(d, d)};
            return sr.weight(p, t.phi.col(i), t.phi.col(i));
          });
      const auto belief = bp.evaluate_belief(0);
      return symmetrized(bp.total(belief).c);
    }
    case DualCMethod::kScalar: {
      Matrix c = Matrix::Zero(d, d);
      std::vector<std::pair<Index, Index>> pairs;
      for (Index i = 0; i < d; ++i) {
        for (Index j = 0; j <= i; ++j) pairs.emplace_back(i, j);
      }
      parallel_for(pairs.size(), jobs, [&](std::size_t k) {
        const auto [i, j] = pairs[k];
        auto bp = second_order_engine(model, Vector::Unit(d, i), Vector::Unit(d, j));
        const double v = bp.total(bp.evaluate_belief(0)).c;
        c(i, j) = v;
        c(j, i) = v;
      });
      return c;
    }
    case DualCMethod::kPairwise: {
      // C = sum_{a, b} sum_{y_a, y_b} Pr~(y_a, y_b) phi_a(y_a) phi_b(y_b)^T,
      // with Pr~ the q^2-weighted joint of the two factor configurations.
      Matrix c = Matrix::Zero(d, d);
      const std::size_t nf = tree.factor_count();
      for (std::size_t a = 0; a < nf; ++a) {
        const auto& ta = model.tables()[a];
        if (!ta.has_features()) continue;
        for (std::size_t ca = 0; ca < tree.config_count(a); ++ca) {
          const SdppModel* m = &model;
          MessagePassing<SumProduct> bp(tree, SumProduct{}, [m, a, ca](std::size_t f, std::size_t c2) {
            if (f == a && c2 != ca) return 0.0;
            const double q = m->tables()[f].q(static_cast<Index>(c2));
            return q * q;
          });
          bp.run(0);
          for (std::size_t b = 0; b < nf; ++b) {
            const auto& tb = model.tables()[b];
            if (!tb.has_features()) continue;
            Vector acc = Vector::Zero(d);
            // Clamping makes configurations of a other than ca vanish, so
            // the diagonal term b == a needs no special case.
            for (std::size_t cb = 0; cb < tree.config_count(b); ++cb) {
              acc += bp.factor_belief(b, cb) * tb.phi.col(static_cast<Index>(cb));
            }
            c += ta.phi.col(static_cast<Index>(ca)) * acc.transpose();
          }
        }
      }
      return symmetrized(c);
    }
  }
  return Matrix::Zero(d, d);
}

/// Dual representation whose provider enumerates structures by index.
inline DualRepresentation sdpp_dual(const SdppModel& model, Matrix c) {
  const double count = model.structure_count();
  const SdppModel* m = &model;
  DualRepresentation out;
  out.c = std::move(c);
  out.dim = model.dim();
  out.n_items = count < 1e18 ? static_cast<std::size_t>(count) : 0;
  out.column = [m](std::size_t i) { return m->column(m->decode(i)); };
  return out;
}

/// mu_r(y) = sum_n 1/(lambda_n + 1) sum_{y ~ y_r} q^2(y) (phi(y)^T v_n)^2, an
/// R x M matrix.
inline Matrix part_marginals(const SdppModel& model, const DualEigenbasis& eigen,
                             std::size_t jobs = 1) {
  const std::size_t r_count = model.parts();
  const std::size_t m = model.labels();
  const Index d = eigen.eigenvalues.size();
  std::vector<Matrix> per(static_cast<std::size_t>(d));
  parallel_for(per.size(), jobs, [&](std::size_t n) {
    const Vector v = eigen.eigenvectors.col(static_cast<Index>(n));
    auto bp = second_order_engine(model, v, v);
    bp.run(0);
    Matrix mu(static_cast<Index>(r_count), static_cast<Index>(m));
    for (std::size_t r = 0; r < r_count; ++r) {
      const auto b = bp.belief(r);
      for (std::size_t y = 0; y < m; ++y) mu(static_cast<Index>(r), static_cast<Index>(y)) = b[y].c;
    }
    per[n] = mu / (eigen.eigenvalues(static_cast<Index>(n)) + 1.0);
  });
  Matrix out = Matrix::Zero(static_cast<Index>(r_count), static_cast<Index>(m));
  for (const auto& mu : per) out += mu;
  return out;
}

/// Hook called after every tree-walk step from node b to node a with the
/// engines' current messages; used to check the walk invariant.
using WalkObserver = std::function<void(std::size_t from, std::size_t to,
                                        const std::vector<MessagePassing<SecondOrderSemiring>>&)>;

namespace detail {

inline std::size_t draw_label(const std::vector<MessagePassing<SecondOrderSemiring>>& engines,
                              std::size_t part, std::size_t labels, Rng& rng) {
  std::vector<double> w(labels, 0.0);
  for (const auto& bp : engines) {
    const auto b = bp.belief(part);
    for (std::size_t y = 0; y < labels; ++y) w[y] += b[y].c;
  }
  for (auto& x : w) x = std::max(0.0, x);
  double total = 0.0;
  for (double x : w) total += x;
  if (!(total > 0.0)) fail(ErrorCode::kDegenerateModel, "structure distribution has no mass");
  return rng.discrete(w);
}

}  // namespace detail

/// Pr(y) proportional to sum_v q^2(y) (v^T phi(y))^2 over the columns of
/// `basis`, via one initial pass and a depth-first walk that refreshes a
/// single message per step.
inline Structure sample_structure(const SdppModel& model, const Matrix& basis, Rng& rng,
                                  const WalkObserver& observer = {}) {
  const FactorTree& tree = model.tree();
  std::vector<MessagePassing<SecondOrderSemiring>> engines;
  for (Index j = 0; j < basis.cols(); ++j) {
    engines.push_back(second_order_engine(model, basis.col(j), basis.col(j)));
    engines.back().run_forward(0);
  }
  Structure y(model.parts(), 0);
  std::vector<bool> assigned(model.parts(), false);
  const auto tour = tree.euler_tour(0);
  for (std::size_t t = 0; t < tour.size(); ++t) {
    const std::size_t b = tour[t];
    if (!tree.is_factor(b) && !assigned[b]) {
      y[b] = detail::draw_label(engines, b, model.labels(), rng);
      assigned[b] = true;
      for (auto& bp : engines) bp.fix(b, y[b]);
    }
    if (t + 1 < tour.size()) {
      const std::size_t a = tour[t + 1];
      for (auto& bp : engines) bp.update(b, a);
      if (observer) observer(b, a, engines);
    }
  }
  return y;
}

/// Reference sampler: one full conditioned propagation per part.
inline Structure sample_structure_naive(const SdppModel& model, const Matrix& basis, Rng& rng) {
  std::vector<MessagePassing<SecondOrderSemiring>> engines;
  for (Index j = 0; j < basis.cols(); ++j) {
    engines.push_back(second_order_engine(model, basis.col(j), basis.col(j)));
  }
  Structure y(model.parts(), 0);
  for (std::size_t r = 0; r < model.parts(); ++r) {
    for (auto& bp : engines) bp.run_forward(r);
    y[r] = detail::draw_label(engines, r, model.labels(), rng);
    for (auto& bp : engines) bp.fix(r, y[r]);
  }
  return y;
}

namespace detail {

inline std::vector<Structure> sdpp_sample_from(const SdppModel& model, const Matrix& c, Matrix v,
                                               Rng& rng) {
  std::vector<Structure> out;
  while (v.cols() > 0) {
    Structure y = sample_structure(model, v, rng);
    const Vector b = model.column(y);
    eliminate_item(v, v.transpose() * b);
    c_orthonormalize(v, c);
    out.push_back(std::move(y));
  }
  return out;
}

inline std::vector<Index> positive_modes(const DualEigenbasis& eigen, std::vector<Index> chosen) {
  std::erase_if(chosen, [&](Index n) { return !(eigen.c_norms(n) > 0.0); });
  return chosen;
}

}  // namespace detail

/// Exact sample from the DPP over all structures.
inline std::vector<Structure> sdpp_sample(const SdppModel& model, const Matrix& c,
                                          const DualEigenbasis& eigen, Rng& rng) {
  const auto chosen = detail::positive_modes(eigen, sample_eigen_indices(eigen.eigenvalues, rng));
  if (chosen.empty()) return {};
  return detail::sdpp_sample_from(model, c, detail::scaled_dual_basis(eigen, chosen), rng);
}

/// Eigenvalues below this fraction of the largest count as zero when
/// choosing exactly k modes.
inline constexpr double kRankRelTol = 1e-12;

inline Vector truncated_spectrum(const Vector& lambda) {
  if (lambda.size() == 0) return lambda;
  const double cut = kRankRelTol * std::max(1.0, lambda.maxCoeff());
  return lambda.unaryExpr([cut](double x) { return x > cut ? x : 0.0; });
}

/// Exactly k structures: k modes chosen by their elementary symmetric
/// weights, then the usual structure-by-structure loop.
inline std::vector<Structure> ksdpp_sample(const SdppModel& model, const Matrix& c,
                                           const DualEigenbasis& eigen, std::size_t k, Rng& rng) {
  const auto chosen = sample_k_eigenvectors(truncated_spectrum(eigen.eigenvalues), k, rng);
  if (chosen.empty()) return {};
  return detail::sdpp_sample_from(model, c, detail::scaled_dual_basis(eigen, chosen), rng);
}

}  // namespace dpp
