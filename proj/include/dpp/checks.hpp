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

// Seeded oracle-equivalence checks: every closed form compared against
// brute-force enumeration at toy scale.

#pragma once

#include <string>
#include <vector>

#include "dpp/dual.hpp"
#include "dpp/inference.hpp"
#include "dpp/kdpp.hpp"
#include "dpp/oracle.hpp"
#include "dpp/projection.hpp"
#include "dpp/sdpp.hpp"

namespace dpp {

struct CheckResult {
  std::string suite;
  std::string name;
  double error = 0.0;  // observed discrepancy
  double tolerance = 0.0;
  bool passed = false;
};

inline const std::vector<std::string>& check_suites() {
  static const std::vector<std::string> names{"kernel", "inference", "dual", "kdpp", "sdpp", "projection"};
  return names;
}

namespace detail {

inline Matrix check_psd(Index n, Rng& rng) {
  Matrix b(n, n);
  for (Index i = 0; i < n; ++i) {
    for (Index j = 0; j < n; ++j) b(i, j) = rng.normal();
  }
  return symmetrized(b.transpose() * b / static_cast<double>(n));
}

inline double rel_diff(double a, double b) {
  return std::abs(a - b) / std::max({std::abs(a), std::abs(b), 1e-300});
}

inline SdppModel check_chain(std::size_t r, std::size_t m, Index d, Rng& rng) {
  FactorTree tree = FactorTree::chain(r, m);
  std::vector<FactorTable> tables(tree.factor_count());
  for (std::size_t f = 0; f < tree.factor_count(); ++f) {
    const auto configs = static_cast<Index>(tree.config_count(f));
    tables[f].q = Vector(configs);
    tables[f].phi = Matrix(d, configs);
    for (Index c = 0; c < configs; ++c) {
      tables[f].q(c) = 0.3 + rng.uniform();
      for (Index i = 0; i < d; ++i) tables[f].phi(i, c) = rng.normal();
      tables[f].phi.col(c).normalize();
    }
  }
  return SdppModel(std::move(tree), std::move(tables), d);
}

class CheckList {
 public:
  explicit CheckList(std::string suite, std::vector<CheckResult>& out) : suite_(std::move(suite)), out_(&out) {}

  /// Passes when error <= tolerance.
  void add(const std::string& name, double error, double tolerance) {
    out_->push_back({suite_, name, error, tolerance, error <= tolerance});
  }

 private:
  std::string suite_;
  std::vector<CheckResult>* out_;
};

inline std::size_t structure_index(const Structure& y, std::size_t m) {
  std::size_t key = 0, stride = 1;
  for (auto label : y) {
    key += label * stride;
    stride *= m;
  }
  return key;
}

inline void kernel_checks(Rng& rng, CheckList& c) {
  double worst = 0.0;
  for (Index n = 4; n <= 10; ++n) {
    const Matrix l = check_psd(n, rng);
    const auto table = enumerate_dpp(l);
    worst = std::max(worst, rel_diff(std::exp(normalizer(LEnsemble::from_matrix(l)).log_value), table.normalizer()));
  }
  c.add("normalizer equals sum of principal minors", worst, 1e-10);
  const Matrix l = check_psd(6, rng);
  const auto spec = SpectralDecomposition::of(l);
  const Matrix back = k_to_l(SpectralDecomposition::of(l_to_k(spec).matrix())).matrix();
  c.add("L -> K -> L round trip", (back - l).norm() / l.norm(), 1e-8);
}

inline void inference_checks(Rng& rng, CheckList& c) {
  const Matrix l = check_psd(6, rng);
  const auto ens = LEnsemble::from_matrix(l);
  const auto table = enumerate_dpp(l);
  const auto k = l_to_k(ens.spectrum());
  double p_err = 0.0, m_err = 0.0;
  for (std::size_t mask = 0; mask < table.subset_count(); ++mask) {
    const auto y = Subset::from_mask(mask);
    for (auto f : {LikelihoodFormula::kLRatio, LikelihoodFormula::kKMixed, LikelihoodFormula::kKSigned}) {
      p_err = std::max(p_err, rel_diff(set_probability(ens, y, f).value, table.probability(mask)));
    }
    m_err = std::max(m_err, rel_diff(marginal(k, y).value, table.marginal(y)));
    m_err = std::max(m_err, rel_diff(complement_marginal(k, y).value, table.complement_marginal(y)));
  }
  c.add("set probability (three formulas)", p_err, 1e-8);
  c.add("inclusion and exclusion marginals", m_err, 1e-8);
  double cond_err = 0.0;
  for (int t = 0; t < 10; ++t) {
    ConditionSpec cs;
    std::vector<std::size_t> in, out;
    for (std::size_t i = 0; i < 6; ++i) {
      const double u = rng.uniform();
      if (u < 0.2) in.push_back(i);
      else if (u < 0.4) out.push_back(i);
    }
    cs.include = Subset(in);
    cs.exclude = Subset(out);
    const auto cond = condition(ens, cs);
    for (const auto& [mask, p] : table.conditional(cs.include, cs.exclude)) {
      std::vector<std::size_t> local;
      for (std::size_t j = 0; j < cond.items.size(); ++j) {
        if (mask & (1ULL << cond.items[j])) local.push_back(j);
      }
      cond_err = std::max(cond_err, rel_diff(set_probability(cond.ensemble, Subset(local)).value, p));
    }
    cond_err = std::max(cond_err, rel_diff(partial_marginal(ens, cs).value, table.partial(cs.include, cs.exclude)));
  }
  c.add("conditioning and partial marginals", cond_err, 1e-8);
  const auto report = empirical_distribution(
      [&](Rng& g) { return static_cast<std::size_t>(sample(ens.spectrum(), g).mask()); }, 40000, rng,
      table.distribution());
  c.add("spectral sampler TV (40k draws)", report.tv, 0.03);
}

inline void dual_checks(Rng& rng, CheckList& c) {
  const Index n = 6, d = 3;
  Vector q(n);
  Matrix phi(d, n);
  for (Index i = 0; i < n; ++i) {
    q(i) = 0.5 + rng.uniform();
    for (Index j = 0; j < d; ++j) phi(j, i) = rng.normal();
    phi.col(i).normalize();
  }
  const auto qd = QualityDiversity::make(q, phi);
  const auto dual = build_dual(qd);
  const Matrix l = qd.columns().transpose() * qd.columns();
  const auto table = enumerate_dpp(l);
  c.add("dual normalizer", rel_diff(std::exp(dual_normalizer(dual).log_value), table.normalizer()), 1e-10);
  const auto eigen = DualEigenbasis::of(dual);
  const Matrix k = detail::marginal_from_l(l);
  double worst = 0.0;
  for (std::size_t i = 0; i < static_cast<std::size_t>(n); ++i) {
    for (std::size_t j = 0; j < static_cast<std::size_t>(n); ++j) {
      worst = std::max(worst, std::abs(dual_marginal_entry(eigen, dual, i, j) -
                                       k(static_cast<Index>(i), static_cast<Index>(j))));
    }
  }
  c.add("dual marginal entries", worst, 1e-9);
  const auto report = empirical_distribution(
      [&](Rng& g) { return static_cast<std::size_t>(dual_sample(eigen, dual, g).mask()); }, 40000, rng,
      table.distribution());
  c.add("dual sampler TV (40k draws)", report.tv, 0.03);
}

inline void kdpp_checks(Rng& rng, CheckList& c) {
  const Matrix l = check_psd(8, rng);
  const auto ens = LEnsemble::from_matrix(l);
  const auto spec = ens.spectrum();
  const auto table = enumerate_dpp(l);
  double worst = 0.0;
  for (std::size_t k = 0; k <= 8; ++k) {
    worst = std::max(worst, rel_diff(kdpp_normalizer(spec.eigenvalues, k).value, table.k_sum(k)));
  }
  c.add("k-DPP normalizer equals e_k", worst, 1e-10);
  const Vector marg = kdpp_singleton_marginals(spec, 3);
  double m_err = 0.0;
  for (std::size_t i = 0; i < 8; ++i) {
    double s = 0.0;
    for (std::size_t mask = 0; mask < table.subset_count(); ++mask) {
      if (mask & (std::size_t{1} << i)) s += table.k_probability(mask, 3);
    }
    m_err = std::max(m_err, rel_diff(marg(static_cast<Index>(i)), s));
  }
  c.add("k-DPP singleton marginals", m_err, 1e-9);
  std::vector<double> ref(table.subset_count());
  for (std::size_t mask = 0; mask < ref.size(); ++mask) ref[mask] = table.k_probability(mask, 2);
  const auto report = empirical_distribution(
      [&](Rng& g) { return static_cast<std::size_t>(kdpp_sample(spec, 2, g).mask()); }, 40000, rng, ref);
  c.add("k-DPP sampler TV (40k draws)", report.tv, 0.03);
}

inline void sdpp_checks(Rng& rng, CheckList& c) {
  const auto model = check_chain(3, 3, 4, rng);
  const auto en = enumerate_structures(model);
  const Matrix brute = en.b * en.b.transpose();
  const Matrix cv = compute_dual_c(model);
  c.add("dual C (vectorized) vs enumeration", (cv - brute).norm() / brute.norm(), 1e-10);
  c.add("dual C (scalar) vs enumeration",
        (compute_dual_c(model, DualCMethod::kScalar) - brute).norm() / brute.norm(), 1e-10);
  c.add("dual C (pairwise) vs enumeration",
        (compute_dual_c(model, DualCMethod::kPairwise) - brute).norm() / brute.norm(), 1e-9);
  const auto n = en.l.rows();
  const Matrix k = en.l * (en.l + Matrix::Identity(n, n)).inverse();
  Matrix expect = Matrix::Zero(3, 3);
  for (Index i = 0; i < n; ++i) {
    for (std::size_t r = 0; r < 3; ++r) {
      expect(static_cast<Index>(r), static_cast<Index>(en.structures[static_cast<std::size_t>(i)][r])) += k(i, i);
    }
  }
  const Matrix mu = part_marginals(model, DualEigenbasis::of(cv));
  c.add("part marginals vs explicit K", (mu - expect).norm() / expect.norm(), 1e-8);

  const auto small = check_chain(2, 3, 3, rng);
  const auto es = enumerate_structures(small);
  const Matrix cs = compute_dual_c(small);
  const auto eigen = DualEigenbasis::of(cs);
  const auto table = enumerate_dpp(es.l);
  const auto report = empirical_distribution(
      [&](Rng& g) {
        std::size_t mask = 0;
        for (const auto& y : sdpp_sample(small, cs, eigen, g)) mask |= std::size_t{1} << structure_index(y, 3);
        return mask;
      },
      20000, rng, table.distribution());
  c.add("structured sampler TV (20k draws)", report.tv, 0.04);
}

inline void projection_checks(Rng& rng, CheckList& c) {
  const Index n = 8, d = 5;
  Vector q(n);
  Matrix phi(d, n);
  for (Index i = 0; i < n; ++i) {
    q(i) = 0.5 + rng.uniform();
    for (Index j = 0; j < d; ++j) phi(j, i) = rng.normal();
    phi.col(i).normalize();
  }
  const auto qd = QualityDiversity::make(q, phi);
  const ProjectionMatrix id{Matrix::Identity(d, d), 0, "identity"};
  c.add("identity projection L1", l1_distance_exact(qd, project_features(id, qd), 3), 1e-10);
  const double expect = std::max(2.0 * 3 / 0.4, 24.0 / 0.16 * (std::log(30.0) / std::log(1000.0) + 1.0) *
                                                     (std::log(1000.0) + 1.0) + 2.0);
  c.add("dimension formula", std::abs(projection_dim_real(3, 0.4, 0.1, 1000) - expect), 1e-9);
}

}  // namespace detail

/// Runs one suite by name, or every suite for "all".
inline std::vector<CheckResult> run_checks(const std::string& suite, std::uint64_t seed) {
  std::vector<CheckResult> out;
  bool known = suite == "all";
  for (std::size_t s = 0; s < check_suites().size(); ++s) {
    const auto& name = check_suites()[s];
    if (suite != "all" && suite != name) continue;
    known = true;
    Rng rng = Rng(seed).derive(s);
    detail::CheckList list(name, out);
    if (name == "kernel") detail::kernel_checks(rng, list);
    if (name == "inference") detail::inference_checks(rng, list);
    if (name == "dual") detail::dual_checks(rng, list);
    if (name == "kdpp") detail::kdpp_checks(rng, list);
    if (name == "sdpp") detail::sdpp_checks(rng, list);
    if (name == "projection") detail::projection_checks(rng, list);
  }
  if (!known) fail(ErrorCode::kInvalidInput, "unknown suite '" + suite + "'");
  return out;
}

}  // namespace dpp
