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

// Statistics for validating samplers against exact tables. Distribution
// tails come from Boost.Math.

#pragma once

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include <boost/math/distributions/chi_squared.hpp>
#include <boost/math/distributions/students_t.hpp>

namespace dpp {

/// Half the L1 distance between normalized `counts` and `reference`.
inline double tv_distance(const std::vector<double>& counts, const std::vector<double>& reference) {
  const double n = std::accumulate(counts.begin(), counts.end(), 0.0);
  const double z = std::accumulate(reference.begin(), reference.end(), 0.0);
  double s = 0.0;
  for (std::size_t i = 0; i < reference.size(); ++i) {
    s += std::abs((i < counts.size() ? counts[i] : 0.0) / n - reference[i] / z);
  }
  return 0.5 * s;
}

struct GoodnessOfFit {
  double statistic = 0.0;
  std::size_t dof = 0;
  double p_value = 1.0;
};

inline double chi_square_upper_tail(double stat, std::size_t dof) {
  if (dof == 0) return 1.0;
  if (!std::isfinite(stat)) return 0.0;
  boost::math::chi_squared dist(static_cast<double>(dof));
  return boost::math::cdf(boost::math::complement(dist, stat));
}

/// Pearson test of counts against reference probabilities. Cells with
/// expected count below `min_expected` are pooled into one cell.
inline GoodnessOfFit chi_square_gof(const std::vector<double>& counts,
                                    const std::vector<double>& reference,
                                    double min_expected = 5.0) {
  const double n = std::accumulate(counts.begin(), counts.end(), 0.0);
  const double z = std::accumulate(reference.begin(), reference.end(), 0.0);
  GoodnessOfFit out;
  double pooled_obs = 0.0, pooled_exp = 0.0;
  std::size_t cells = 0;
  for (std::size_t i = 0; i < reference.size(); ++i) {
    const double e = n * reference[i] / z;
    const double o = i < counts.size() ? counts[i] : 0.0;
    if (e < min_expected) {
      pooled_obs += o;
      pooled_exp += e;
      continue;
    }
    out.statistic += (o - e) * (o - e) / e;
    ++cells;
  }
  if (pooled_exp > 0.0) {
    out.statistic += (pooled_obs - pooled_exp) * (pooled_obs - pooled_exp) / pooled_exp;
    ++cells;
  } else if (pooled_obs > 0.0) {
    out.statistic = std::numeric_limits<double>::infinity();
  }
  out.dof = cells > 0 ? cells - 1 : 0;
  out.p_value = chi_square_upper_tail(out.statistic, out.dof);
  return out;
}

/// Homogeneity test of two count vectors over the same cells; cells whose
/// pooled count is below `min_count` are merged.
inline GoodnessOfFit two_sample_chi_square(const std::vector<double>& a,
                                           const std::vector<double>& b,
                                           double min_count = 10.0) {
  const double na = std::accumulate(a.begin(), a.end(), 0.0);
  const double nb = std::accumulate(b.begin(), b.end(), 0.0);
  std::vector<std::pair<double, double>> cells;
  std::pair<double, double> rest{0.0, 0.0};
  for (std::size_t i = 0; i < std::max(a.size(), b.size()); ++i) {
    const double x = i < a.size() ? a[i] : 0.0;
    const double y = i < b.size() ? b[i] : 0.0;
    if (x + y < min_count) {
      rest.first += x;
      rest.second += y;
    } else {
      cells.emplace_back(x, y);
    }
  }
  if (rest.first + rest.second > 0.0) cells.push_back(rest);
  GoodnessOfFit out;
  const double n = na + nb;
  for (const auto& [x, y] : cells) {
    const double t = x + y;
    const double ea = t * na / n;
    const double eb = t * nb / n;
    out.statistic += (x - ea) * (x - ea) / ea + (y - eb) * (y - eb) / eb;
  }
  out.dof = cells.size() > 0 ? cells.size() - 1 : 0;
  out.p_value = chi_square_upper_tail(out.statistic, out.dof);
  return out;
}

/// Distribution of a sum of independent Bernoulli(p_i).
inline std::vector<double> poisson_binomial(const std::vector<double>& p) {
  std::vector<double> pmf{1.0};
  for (double pi : p) {
    std::vector<double> next(pmf.size() + 1, 0.0);
    for (std::size_t j = 0; j < pmf.size(); ++j) {
      next[j] += pmf[j] * (1.0 - pi);
      next[j + 1] += pmf[j] * pi;
    }
    pmf = std::move(next);
  }
  return pmf;
}

namespace detail {

inline std::vector<double> average_ranks(const std::vector<double>& x) {
  std::vector<std::size_t> idx(x.size());
  std::iota(idx.begin(), idx.end(), 0);
  std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return x[a] < x[b]; });
  std::vector<double> rank(x.size());
  for (std::size_t i = 0; i < idx.size();) {
    std::size_t j = i;
    while (j + 1 < idx.size() && x[idx[j + 1]] == x[idx[i]]) ++j;
    const double r = 0.5 * static_cast<double>(i + j) + 1.0;
    for (std::size_t k = i; k <= j; ++k) rank[idx[k]] = r;
    i = j + 1;
  }
  return rank;
}

}  // namespace detail

struct Correlation {
  double rho = 0.0;
  double p_value = 1.0;  // two-sided, t approximation with n - 2 dof
};

inline Correlation spearman(const std::vector<double>& x, const std::vector<double>& y) {
  const auto rx = detail::average_ranks(x);
  const auto ry = detail::average_ranks(y);
  const double n = static_cast<double>(x.size());
  const double mx = std::accumulate(rx.begin(), rx.end(), 0.0) / n;
  const double my = std::accumulate(ry.begin(), ry.end(), 0.0) / n;
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < rx.size(); ++i) {
    sxy += (rx[i] - mx) * (ry[i] - my);
    sxx += (rx[i] - mx) * (rx[i] - mx);
    syy += (ry[i] - my) * (ry[i] - my);
  }
  Correlation out;
  out.rho = sxy / std::sqrt(sxx * syy);
  if (x.size() < 3) return out;
  if (std::abs(out.rho) >= 1.0) {
    out.p_value = 0.0;
    return out;
  }
  const double t = out.rho * std::sqrt((n - 2.0) / (1.0 - out.rho * out.rho));
  boost::math::students_t dist(n - 2.0);
  out.p_value = 2.0 * boost::math::cdf(boost::math::complement(dist, std::abs(t)));
  return out;
}

struct TTest {
  double mean = 0.0;
  double t = 0.0;
  double p_value = 1.0;  // one-sided, H1: mean > 0
};

inline TTest one_sided_t_test(const std::vector<double>& diffs) {
  TTest out;
  const double n = static_cast<double>(diffs.size());
  if (diffs.size() < 2) return out;
  out.mean = std::accumulate(diffs.begin(), diffs.end(), 0.0) / n;
  double ss = 0.0;
  for (double d : diffs) ss += (d - out.mean) * (d - out.mean);
  const double se = std::sqrt(ss / (n - 1.0) / n);
  if (se == 0.0) {
    out.p_value = out.mean > 0.0 ? 0.0 : 1.0;
    return out;
  }
  out.t = out.mean / se;
  boost::math::students_t dist(n - 1.0);
  out.p_value = boost::math::cdf(boost::math::complement(dist, out.t));
  return out;
}

}  // namespace dpp
