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

// Acceptance runner: one PASS/FAIL line per criterion. Exits nonzero when
// any criterion fails.

#include <chrono>
#include <cstdio>
#include <functional>
#include <iostream>
#include <limits>
#include <sstream>
#include <string>
#include <vector>

#include "support.hpp"

namespace {

using namespace dpp;
using dpp::testing::gaussian;
using dpp::testing::random_chain;
using dpp::testing::random_psd;
using dpp::testing::random_qd;
using dpp::testing::random_subset;

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

double rel(double a, double b) { return std::abs(a - b) / std::max({std::abs(a), std::abs(b), 1e-300}); }

std::string fmt(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3g", x);
  return buf;
}

/// Collects sub-checks of one criterion.
struct Verdict {
  bool pass = true;
  std::vector<std::string> notes;

  void check(bool ok, const std::string& note) {
    pass = pass && ok;
    notes.push_back(note + (ok ? "" : " [failed]"));
  }
};

std::size_t mask_of(const Subset& s) { return static_cast<std::size_t>(s.mask()); }

std::size_t structure_key(const Structure& y, std::size_t m) {
  std::size_t key = 0, stride = 1;
  for (auto label : y) {
    key += label * stride;
    stride *= m;
  }
  return key;
}

// 1 -------------------------------------------------------------------------
Verdict normalization(Rng& rng) {
  Verdict v;
  const auto t0 = Clock::now();
  double worst = 0.0;
  for (int t = 0; t < 50; ++t) {
    const Index n = 4 + static_cast<Index>(rng.uniform_index(9));
    const Matrix l = random_psd(n, rng);
    worst = std::max(worst, rel(normalizer(LEnsemble::from_matrix(l)).value, enumerate_dpp(l).normalizer()));
  }
  const double secs = seconds_since(t0);
  v.check(worst <= 1e-10, "max rel err " + fmt(worst) + " (tol 1e-10)");
  v.check(secs < 10.0, "runtime " + fmt(secs) + " s (limit 10 s)");
  return v;
}

// 2 -------------------------------------------------------------------------
Verdict likelihood_formulas(Rng& rng) {
  Verdict v;
  double worst = 0.0;
  for (int t = 0; t < 100; ++t) {
    const Index n = 3 + static_cast<Index>(rng.uniform_index(6));
    const auto ens = LEnsemble::from_matrix(random_psd(n, rng));
    const auto y = random_subset(static_cast<std::size_t>(n), rng);
    const double a = set_probability(ens, y, LikelihoodFormula::kLRatio).value;
    const double b = set_probability(ens, y, LikelihoodFormula::kKMixed).value;
    const double c = set_probability(ens, y, LikelihoodFormula::kKSigned).value;
    worst = std::max({worst, rel(a, b), rel(a, c), rel(b, c)});
  }
  v.check(worst <= 1e-8, "max pairwise rel err " + fmt(worst) + " (tol 1e-8)");
  return v;
}

// 3 -------------------------------------------------------------------------
Verdict sampling_law(Rng& rng) {
  Verdict v;
  const auto t0 = Clock::now();
  const Matrix l = random_psd(6, rng);
  const auto table = enumerate_dpp(l);
  const auto spec = SpectralDecomposition::of(l);
  std::vector<double> sizes(7, 0.0);
  const auto report = empirical_distribution(
      [&](Rng& g) {
        const auto y = sample(spec, g);
        sizes[y.size()] += 1.0;
        return mask_of(y);
      },
      200000, rng, table.distribution());
  std::vector<double> p;
  for (Index i = 0; i < 6; ++i) p.push_back(spec.eigenvalues(i) / (spec.eigenvalues(i) + 1.0));
  const auto fit = chi_square_gof(sizes, poisson_binomial(p));
  const double secs = seconds_since(t0);
  v.check(report.tv < 0.01, "TV " + fmt(report.tv) + " (limit 0.01)");
  v.check(fit.p_value > 0.001, "cardinality chi-square p " + fmt(fit.p_value) + " (> 0.001)");
  v.check(secs < 60.0, "runtime " + fmt(secs) + " s (limit 60 s)");
  return v;
}

// 4 -------------------------------------------------------------------------
Verdict dual_equivalence(Rng& rng) {
  Verdict v;
  const auto qd = random_qd(6, 3, rng);
  const auto dual = build_dual(qd);
  const auto ens = LEnsemble::from_quality_diversity(qd);
  const double z = rel(dual_normalizer(dual).value, normalizer(ens).value);
  v.check(z <= 1e-10, "normalizer rel err " + fmt(z) + " (tol 1e-10)");
  const auto eigen = DualEigenbasis::of(dual);
  const Matrix k = l_to_k(ens.spectrum()).matrix();
  double worst = 0.0;
  for (std::size_t i = 0; i < 6; ++i) {
    for (std::size_t j = 0; j < 6; ++j) {
      worst = std::max(worst, std::abs(dual_marginal_entry(eigen, dual, i, j) -
                                       k(static_cast<Index>(i), static_cast<Index>(j))));
    }
  }
  v.check(worst <= 1e-9, "marginal entry err " + fmt(worst) + " (tol 1e-9)");
  const auto report = empirical_distribution(
      [&](Rng& g) { return mask_of(dual_sample(eigen, dual, g)); }, 200000, rng,
      enumerate_dpp(ens.matrix()).distribution());
  v.check(report.tv < 0.01, "dual sampler TV " + fmt(report.tv) + " (limit 0.01)");
  return v;
}

// 5 -------------------------------------------------------------------------
Verdict conditioning(Rng& rng) {
  Verdict v;
  double worst = 0.0;
  for (int t = 0; t < 50; ++t) {
    const auto n = 4 + rng.uniform_index(4);
    const Matrix l = random_psd(static_cast<Index>(n), rng);
    const auto ens = LEnsemble::from_matrix(l);
    const auto table = enumerate_dpp(l);
    std::vector<std::size_t> in, out;
    for (std::size_t i = 0; i < n; ++i) {
      const double u = rng.uniform();
      const bool inc = t % 3 != 1 && u < 0.3;  // t % 3: mixed, exclude-only, include-only
      const bool exc = t % 3 != 2 && !inc && u > 0.7;
      if (inc) in.push_back(i);
      if (exc) out.push_back(i);
    }
    ConditionSpec cs{Subset(in), Subset(out)};
    const auto cond = condition(ens, cs);
    for (const auto& [mask, p] : table.conditional(cs.include, cs.exclude)) {
      std::vector<std::size_t> local;
      for (std::size_t j = 0; j < cond.items.size(); ++j) {
        if (mask & (std::size_t{1} << cond.items[j])) local.push_back(j);
      }
      worst = std::max(worst, rel(set_probability(cond.ensemble, Subset(local)).value, p));
    }
    worst = std::max(worst, rel(partial_marginal(ens, cs).value, table.partial(cs.include, cs.exclude)));
  }
  v.check(worst <= 1e-8, "max rel err " + fmt(worst) + " (tol 1e-8)");
  // Rank 2: any three included items have zero volume.
  const auto low = LEnsemble::from_matrix(random_psd(5, rng, 2));
  const auto code = dpp::testing::error_code([&] { condition(low, {Subset{0, 1, 2}, {}}); });
  v.check(code == ErrorCode::kZeroProbabilityCondition, "zero-probability condition raises its error");
  return v;
}

// 6 -------------------------------------------------------------------------
double esp_naive(const std::vector<double>& lam, std::size_t k) {
  std::vector<double> e(k + 1, 0.0);
  e[0] = 1.0;
  for (double x : lam) {
    for (std::size_t j = k; j >= 1; --j) e[j] += x * e[j - 1];
  }
  return e[k];
}

Verdict kdpp(Rng& rng) {
  Verdict v;
  double worst = 0.0;
  for (Index n = 2; n <= 8; ++n) {
    const Matrix l = random_psd(n, rng);
    const auto table = enumerate_dpp(l);
    const auto lam = SpectralDecomposition::of(l).eigenvalues;
    for (std::size_t k = 0; k <= static_cast<std::size_t>(n); ++k) {
      worst = std::max(worst, rel(kdpp_normalizer(lam, k).value, table.k_sum(k)));
    }
  }
  v.check(worst <= 1e-10, "Z_k rel err " + fmt(worst) + " (tol 1e-10)");

  const auto id = SpectralDecomposition::of(Matrix::Identity(4, 4));
  std::vector<double> uniform(16, 0.0);
  for (std::size_t m = 0; m < 16; ++m) uniform[m] = std::popcount(m) == 2 ? 1.0 / 6.0 : 0.0;
  const auto report =
      empirical_distribution([&](Rng& g) { return mask_of(kdpp_sample(id, 2, g)); }, 200000, rng, uniform);
  v.check(report.tv < 0.01, "identity 2-DPP TV " + fmt(report.tv) + " (limit 0.01)");

  const auto spec = SpectralDecomposition::of(random_psd(12, rng));
  const Vector tree = kdpp_singleton_marginals(spec, 4);
  std::vector<double> lam(spec.eigenvalues.data(), spec.eigenvalues.data() + 12);
  const double ek = esp_naive(lam, 4);
  double m_err = 0.0;
  for (Index i = 0; i < 12; ++i) {
    double s = 0.0;
    for (Index n = 0; n < 12; ++n) {
      auto rest = lam;
      rest.erase(rest.begin() + n);
      s += lam[static_cast<std::size_t>(n)] * spec.eigenvectors(i, n) * spec.eigenvectors(i, n) * esp_naive(rest, 3);
    }
    m_err = std::max(m_err, rel(tree(i), s / ek));
  }
  v.check(m_err <= 1e-10, "singleton marginals vs leave-one-out rel err " + fmt(m_err) + " (tol 1e-10)");
  const double sum_err = std::abs(tree.sum() - 4.0);
  v.check(sum_err <= 1e-9, "marginal sum err " + fmt(sum_err) + " (tol 1e-9)");
  return v;
}

// 7 -------------------------------------------------------------------------
Vector central_difference(const std::function<double(const Vector&)>& fn, const Vector& x, double h) {
  Vector g(x.size());
  for (Index i = 0; i < x.size(); ++i) {
    Vector a = x, b = x;
    a(i) += h;
    b(i) -= h;
    g(i) = (fn(a) - fn(b)) / (2 * h);
  }
  return g;
}

Verdict learning(Rng& rng) {
  Verdict v;
  const auto t0 = Clock::now();
  double q_err = 0.0, m_err = 0.0, concave = -std::numeric_limits<double>::infinity(), convex = std::numeric_limits<double>::infinity();
  for (int t = 0; t < 20; ++t) {
    const Vector theta = 0.5 * gaussian(4, 1, rng);
    const auto data = LearningData::make(dpp::testing::synthetic_instances(theta, 2, 6, 4, rng));
    const auto ll = [&](const Vector& x) { return log_likelihood(x, data); };
    const Vector g = gradient(theta, data);
    q_err = std::max(q_err, (g - central_difference(ll, theta, 1e-5)).norm() / std::max(g.norm(), 1e-12));
    const Vector dir = gaussian(4, 1, rng).normalized();
    concave = std::max(concave, ll(theta + 0.1 * dir) - 2 * ll(theta) + ll(theta - 0.1 * dir));

    std::vector<LEnsemble> experts;
    for (int e = 0; e < 4; ++e) experts.push_back(LEnsemble::from_matrix(random_psd(6, rng)));
    const Matrix deltas = mixture_deltas(experts, 2, dpp::testing::random_pairs(6, 2, 10, rng), 5.0);
    const auto loss = [&](const Vector& x) { return mixture_objective_grad(x, deltas).first; };
    const Vector w = project_simplex(gaussian(4, 1, rng));
    const Vector mg = mixture_objective_grad(w, deltas).second;
    m_err = std::max(m_err, (mg - central_difference(loss, w, 1e-5)).norm() / std::max(mg.norm(), 1e-12));
    const Vector u = project_simplex(gaussian(4, 1, rng));
    convex = std::min(convex, loss(0.25 * w + 0.75 * u) - 2 * loss(0.5 * w + 0.5 * u) + loss(0.75 * w + 0.25 * u));
  }
  v.check(q_err < 1e-6, "quality gradient vs finite differences " + fmt(q_err) + " (< 1e-6)");
  v.check(m_err < 1e-6, "mixture gradient vs finite differences " + fmt(m_err) + " (< 1e-6)");
  v.check(concave <= 1e-8, "log-likelihood max second difference " + fmt(concave) + " (<= 1e-8)");
  v.check(convex >= -1e-8, "mixture loss min second difference " + fmt(convex) + " (>= -1e-8)");

  Rng data_rng(7);
  Vector theta_star(3);
  theta_star << 0.8, -0.5, 0.3;
  const auto data = LearningData::make(dpp::testing::synthetic_instances(theta_star, 200, 8, 8, data_rng));
  const auto res = train_quality(data, Vector::Zero(3));
  const double err = (res.theta - theta_star).norm();
  v.check(res.converged && err <= 0.2, "recovery error " + fmt(err) + " (<= 0.2)");
  const double secs = seconds_since(t0);
  v.check(secs < 60.0, "runtime " + fmt(secs) + " s (limit 60 s)");
  return v;
}

// 8 -------------------------------------------------------------------------
Verdict sdpp_core(Rng& rng) {
  Verdict v;
  const auto t0 = Clock::now();
  double brute_err = 0.0, pair_err = 0.0, mu_err = 0.0;
  for (const auto& [r, m] : {std::pair<std::size_t, std::size_t>{3, 3}, {4, 4}, {2, 10}, {4, 10}}) {
    const auto model = random_chain(r, m, 5, rng, r != 4);
    const auto en = enumerate_structures(model);
    const Matrix brute = en.b * en.b.transpose();
    const Matrix c = compute_dual_c(model);
    brute_err = std::max(brute_err, (c - brute).norm() / brute.norm());
    pair_err = std::max(pair_err, (c - compute_dual_c(model, DualCMethod::kPairwise)).norm() / c.norm());
    if (en.l.rows() > 300) continue;
    const auto n = en.l.rows();
    const Matrix k = en.l * (en.l + Matrix::Identity(n, n)).inverse();
    Matrix expect = Matrix::Zero(static_cast<Index>(r), static_cast<Index>(m));
    for (Index i = 0; i < n; ++i) {
      for (std::size_t p = 0; p < r; ++p) {
        expect(static_cast<Index>(p), static_cast<Index>(en.structures[static_cast<std::size_t>(i)][p])) += k(i, i);
      }
    }
    mu_err = std::max(mu_err, (part_marginals(model, DualEigenbasis::of(c)) - expect).norm() / expect.norm());
  }
  v.check(brute_err <= 1e-10, "C vs enumeration rel err " + fmt(brute_err) + " (tol 1e-10)");
  v.check(pair_err <= 1e-9, "C vs pairwise assembly rel err " + fmt(pair_err) + " (tol 1e-9)");
  v.check(mu_err <= 1e-8, "part marginals rel err " + fmt(mu_err) + " (tol 1e-8)");

  const auto toy = random_chain(3, 2, 3, rng);
  const auto en = enumerate_structures(toy);
  const Matrix basis = gaussian(3, 1, rng);
  const Vector w = (en.b.transpose() * basis).rowwise().squaredNorm();
  std::vector<double> law(w.data(), w.data() + w.size());
  for (auto& x : law) x /= w.sum();
  const auto single = empirical_distribution(
      [&](Rng& g) { return structure_key(sample_structure(toy, basis, g), 2); }, 200000, rng, law);
  v.check(single.tv < 0.01, "structure sampler TV " + fmt(single.tv) + " (limit 0.01)");

  const auto mid = random_chain(3, 3, 3, rng);
  const Matrix two = gaussian(3, 2, rng);
  std::vector<double> a(27, 0.0), b(27, 0.0);
  for (int t = 0; t < 50000; ++t) {
    a[structure_key(sample_structure(mid, two, rng), 3)] += 1.0;
    b[structure_key(sample_structure_naive(mid, two, rng), 3)] += 1.0;
  }
  const auto homog = two_sample_chi_square(a, b);
  v.check(homog.p_value > 0.001, "walk vs naive sampler chi-square p " + fmt(homog.p_value) + " (> 0.001)");

  const auto small = random_chain(2, 3, 3, rng);
  const auto es = enumerate_structures(small);
  const Matrix c = compute_dual_c(small);
  const auto eigen = DualEigenbasis::of(c);
  const auto sets = empirical_distribution(
      [&](Rng& g) {
        std::size_t mask = 0;
        for (const auto& y : sdpp_sample(small, c, eigen, g)) mask |= std::size_t{1} << structure_key(y, 3);
        return mask;
      },
      100000, rng, enumerate_dpp(es.l).distribution());
  v.check(sets.tv < 0.02, "structured DPP sampler TV " + fmt(sets.tv) + " (limit 0.02)");
  const double secs = seconds_since(t0);
  v.check(secs < 120.0, "runtime " + fmt(secs) + " s (limit 120 s)");
  return v;
}

// 9 -------------------------------------------------------------------------
Verdict tracking(Rng& rng) {
  Verdict v;
  const auto cal = calibrate(tracking_model(TrackingConfig{}), 5.0);
  v.check(std::abs(cal.expected_size - 5.0) <= 0.05, "tr(K) " + fmt(cal.expected_size) + " (5 +- 0.05)");
  std::vector<double> diffs;
  for (int t = 0; t < 500; ++t) {
    const auto ys = sdpp_sample(cal.model, cal.c, cal.eigen, rng);
    if (ys.size() < 2) continue;  // spread needs a pair
    std::vector<Structure> indep;
    for (std::size_t i = 0; i < ys.size(); ++i) indep.push_back(sample_quality_proportional(cal.model, 1.0, rng));
    diffs.push_back(mean_pairwise_distance(ys) - mean_pairwise_distance(indep));
  }
  const auto test = one_sided_t_test(diffs);
  v.check(test.mean > 0.0 && test.p_value < 0.05,
          "spread difference " + fmt(test.mean) + " over " + std::to_string(diffs.size()) +
              " trials with >= 2 tracks, one-sided p " + fmt(test.p_value) + " (< 0.05)");
  return v;
}

// 10 ------------------------------------------------------------------------
Verdict projection(Rng& rng) {
  Verdict v;
  const auto qd = random_qd(10, 100, rng);
  const auto report = bound_validation(qd, 2, 0.3, 0.2, 100, 1000);
  const double need = (1.0 - 0.2) - 0.12;
  v.check(report.satisfied_fraction >= need,
          "d " + std::to_string(report.d) + ", bound " + fmt(report.bound) + ", satisfied " +
              fmt(report.satisfied_fraction) + " (>= " + fmt(need) + ")");
  std::vector<double> ds, means;
  for (std::size_t d : {1u, 2u, 3u, 5u, 8u, 13u, 21u, 34u, 55u, 89u}) {
    const auto r = bound_validation(qd, 2, 0.3, 0.2, 50, 5000 + 100 * d, d);
    ds.push_back(static_cast<double>(d));
    means.push_back(r.mean_l1);
  }
  const auto corr = spearman(ds, means);
  std::string trend;
  for (double m : means) trend += fmt(m) + " ";
  v.check(corr.rho < 0.0 && corr.p_value < 0.01,
          "mean L1 by d [" + trend + "] Spearman rho " + fmt(corr.rho) + " p " + fmt(corr.p_value) + " (< 0.01)");
  return v;
}

// 11 ------------------------------------------------------------------------
double dual_sample_seconds(std::size_t n, Rng& rng) {
  const Index d = 20;
  Matrix b = gaussian(d, static_cast<Index>(n), rng);
  for (Index i = 0; i < b.cols(); ++i) b.col(i) *= (0.5 + rng.uniform()) / b.col(i).norm();
  const auto dual = DualRepresentation::from_columns([&](std::size_t i) -> Vector { return b.col(static_cast<Index>(i)); }, n, d);
  const auto eigen = DualEigenbasis::of(dual);
  const std::vector<Index> top{d - 1, d - 2, d - 3, d - 4, d - 5};
  const Matrix basis = detail::scaled_dual_basis(eigen, top);
  std::vector<double> times;
  for (int run = 0; run < 3; ++run) {
    const auto t0 = Clock::now();
    for (int rep = 0; rep < 20; ++rep) {
      const auto items = dual_sample_elementary(basis, dual, rng);
      if (items.size() != 5) fail(ErrorCode::kInternalDegeneracy, "expected five items");
    }
    times.push_back(seconds_since(t0));
  }
  std::sort(times.begin(), times.end());
  return times[1];
}

Verdict scaling(Rng& rng) {
  Verdict v;
  const double small = dual_sample_seconds(10000, rng);
  const double large = dual_sample_seconds(20000, rng);
  v.check(large / small <= 2.5, "median times " + fmt(small) + " s / " + fmt(large) + " s, ratio " +
                                    fmt(large / small) + " (<= 2.5)");
  return v;
}

// 12 ------------------------------------------------------------------------
std::string capture(const std::string& args) {
  const std::string cmd = std::string(DPPCTL_PATH) + " " + args + " 2>&1";
  FILE* pipe = ::popen(cmd.c_str(), "r");
  if (!pipe) fail(ErrorCode::kInternalDegeneracy, "cannot run dppctl");
  std::string out;
  char buf[4096];
  std::size_t n = 0;
  while ((n = std::fread(buf, 1, sizeof buf, pipe)) > 0) out.append(buf, n);
  out += "\nstatus " + std::to_string(::pclose(pipe));
  return out;
}

Verdict determinism() {
  Verdict v;
  const auto f = [](const std::string& name) { return dpp::testing::source_path("data/" + name); };
  const std::vector<std::string> runs{
      "sample --model " + f("kernel6.json") + " --seed 7 --count 5",
      "sample --model " + f("qd10.json") + " --dual --seed 7 --count 5",
      "ksample --model " + f("kernel6.json") + " --k 3 --seed 8 --count 5",
      "mbr --model " + f("qd10.json") + " --seed 9 --samples 50",
      "learn --data " + f("training.jsonl") + " --l2 0.1",
      "mixture-learn --data " + f("mixture.json") + " --gamma 2",
      "sdpp-sample --model " + f("chain.json") + " --seed 10 --count 5",
      "sdpp-sample --model " + f("chain.json") + " --k 2 --seed 10 --count 5",
      "sdpp-track --positions 12 --steps 8 --features 12 --target 3 --seed 11 --count 3",
      "sdpp-paths --cities " + f("two_clusters.csv") + " --k 2 --seed 12 --count 3",
      "project --model " + f("qd10.json") + " --d 4 --seed 13",
      "project-analyze --model " + f("qd10.json") + " --trials 10 --d 8 --seed 14 --jobs 2",
      "oracle-check --suite all --seed 15",
  };
  std::size_t same = 0;
  for (const auto& args : runs) {
    const bool ok = capture(args) == capture(args);
    same += ok ? 1 : 0;
    if (!ok) v.check(false, "differs: " + args.substr(0, args.find(' ')));
  }
  v.check(same == runs.size(), std::to_string(same) + "/" + std::to_string(runs.size()) + " seeded invocations byte-identical");
  return v;
}

}  // namespace

int main() {
  struct Criterion {
    int id;
    const char* title;
    std::function<Verdict(Rng&)> run;
  };
  const std::vector<Criterion> criteria{
      {1, "normalization closed form", normalization},
      {2, "likelihood formulas agree", likelihood_formulas},
      {3, "sampling law", sampling_law},
      {4, "dual equivalence", dual_equivalence},
      {5, "conditioning", conditioning},
      {6, "k-DPP", kdpp},
      {7, "learning", learning},
      {8, "structured DPP core", sdpp_core},
      {9, "tracking calibration and spread", tracking},
      {10, "projection bound", projection},
      {11, "dual sampling scales linearly", scaling},
      {12, "CLI determinism", [](Rng&) { return determinism(); }},
  };
  int failed = 0;
  for (const auto& c : criteria) {
    Rng rng = Rng(20260).derive(static_cast<std::uint64_t>(c.id));
    Verdict v;
    const auto t0 = Clock::now();
    try {
      v = c.run(rng);
    } catch (const std::exception& e) {
      v.check(false, std::string("exception: ") + e.what());
    }
    std::string notes;
    for (const auto& n : v.notes) notes += (notes.empty() ? "" : "; ") + n;
    std::cout << "C" << c.id << ' ' << (v.pass ? "PASS" : "FAIL") << ' ' << c.title << ": " << notes << " ["
              << fmt(seconds_since(t0)) << " s]" << std::endl;
    failed += v.pass ? 0 : 1;
  }
  std::cout << (failed == 0 ? "all criteria passed" : std::to_string(failed) + " criteria failed") << std::endl;
  return failed == 0 ? 0 : 1;
}
