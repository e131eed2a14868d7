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

// Two toy structured models: particle trajectories on a line and
// multi-stop routes between cities.

#pragma once

#include <fstream>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include "dpp/sdpp.hpp"

namespace dpp {

inline double normal_density(double x, double sigma = 1.0) {
  return std::exp(-0.5 * x * x / (sigma * sigma)) / (sigma * std::sqrt(2.0 * std::numbers::pi));
}

/// Structures drawn independently with Pr(y) proportional to q(y)^power,
/// by sum-product propagation and the same depth-first walk used for
/// structure sampling.
inline Structure sample_quality_proportional(const SdppModel& model, double power, Rng& rng) {
  const SdppModel* m = &model;
  MessagePassing<SumProduct> bp(model.tree(), SumProduct{}, [m, power](std::size_t f, std::size_t c) {
    return std::pow(m->tables()[f].q(static_cast<Index>(c)), power);
  });
  bp.run_forward(0);
  const FactorTree& tree = model.tree();
  Structure y(model.parts(), 0);
  std::vector<bool> assigned(model.parts(), false);
  const auto tour = tree.euler_tour(0);
  for (std::size_t t = 0; t < tour.size(); ++t) {
    const std::size_t b = tour[t];
    if (!tree.is_factor(b) && !assigned[b]) {
      const auto belief = bp.belief(b);
      std::vector<double> w(belief.begin(), belief.end());
      double total = 0.0;
      for (double x : w) total += x;
      if (!(total > 0.0)) fail(ErrorCode::kDegenerateModel, "every structure has zero quality");
      y[b] = rng.discrete(w);
      assigned[b] = true;
      bp.fix(b, y[b]);
    }
    if (t + 1 < tour.size()) bp.update(b, tour[t + 1]);
  }
  return y;
}

/// Total quality sum_y q(y)^2; zero means no structure can be drawn.
inline double total_squared_quality(const SdppModel& model) {
  auto bp = quality_engine(model);
  return bp.total(bp.evaluate_belief(0));
}

/// Multiplies the quality of factor 0 by sqrt(s), scaling L and C by s.
inline SdppModel scale_model(const SdppModel& model, double s) {
  std::vector<FactorTable> tables = model.tables();
  tables[0].q *= std::sqrt(s);
  return SdppModel(model.tree(), std::move(tables), model.dim(), false);
}

/// Scale s with sum_n s lambda_n / (s lambda_n + 1) = target, by bisection
/// on log s until the expected size is within `tol`.
inline double calibrate_expected_size(const Vector& lambda, double target, double tol = 1e-3) {
  const auto expected = [&](double s) {
    return (s * lambda.array() / (s * lambda.array() + 1.0)).sum();
  };
  std::size_t rank = 0;
  for (Index i = 0; i < lambda.size(); ++i) rank += lambda(i) > 0.0 ? 1 : 0;
  if (!(target > 0.0) || static_cast<double>(rank) <= target) {
    fail(ErrorCode::kInfeasibleCardinality, "expected size target exceeds the kernel rank");
  }
  double lo = -300.0, hi = 300.0;
  for (int it = 0; it < 400; ++it) {
    const double mid = 0.5 * (lo + hi);
    const double e = expected(std::exp(mid));
    if (std::abs(e - target) <= tol * 1e-3) return std::exp(mid);
    (e < target ? lo : hi) = mid;
  }
  const double s = std::exp(0.5 * (lo + hi));
  if (std::abs(expected(s) - target) > tol) {
    fail(ErrorCode::kInternalDegeneracy, "calibration did not converge");
  }
  return s;
}

// Particle tracking ---------------------------------------------------------

struct TrackingConfig {
  std::size_t positions = 50;  // M
  std::size_t steps = 50;      // R
  std::size_t features = 50;   // D, feature l centred on position l
  double transition_sigma = 1.0;
  double feature_sigma = 1.0;
  double expected_size = 5.0;
};

/// Trimodal start quality: main mode at 25, smaller ones at 10 and 40
/// (positions are 1-based; label l is position l + 1).
inline double tracking_start_quality(double position, const TrackingConfig& config) {
  const double scale = static_cast<double>(config.positions) / 50.0;
  const auto bump = [&](double centre, double width, double height) {
    const double z = (position - centre * scale) / (width * scale);
    return height * std::exp(-0.5 * z * z);
  };
  return bump(25.0, 4.0, 1.0) + bump(10.0, 3.0, 0.6) + bump(40.0, 3.0, 0.6);
}

inline SdppModel tracking_model(const TrackingConfig& config) {
  const std::size_t m = config.positions;
  const std::size_t r = config.steps;
  const Index d = static_cast<Index>(config.features);
  FactorTree tree = FactorTree::chain(r, m);
  std::vector<FactorTable> tables(tree.factor_count());
  Matrix phi(d, static_cast<Index>(m));
  for (std::size_t y = 0; y < m; ++y) {
    for (Index l = 0; l < d; ++l) {
      // Feature centres spread evenly over the positions.
      const double centre = d > 1 ? static_cast<double>(l) * static_cast<double>(m - 1) / static_cast<double>(d - 1) : 0.0;
      phi(l, static_cast<Index>(y)) = normal_density(centre - static_cast<double>(y), config.feature_sigma);
    }
    phi.col(static_cast<Index>(y)).normalize();
  }
  for (std::size_t p = 0; p < r; ++p) {
    Vector q = Vector::Ones(static_cast<Index>(m));
    if (p == 0) {
      for (std::size_t y = 0; y < m; ++y) {
        q(static_cast<Index>(y)) = tracking_start_quality(static_cast<double>(y + 1), config);
      }
    }
    tables[p] = {q, phi};
  }
  Vector trans(static_cast<Index>(m * m));
  for (std::size_t a = 0; a < m; ++a) {
    for (std::size_t b = 0; b < m; ++b) {
      trans(static_cast<Index>(a + b * m)) =
          normal_density(static_cast<double>(a) - static_cast<double>(b), config.transition_sigma);
    }
  }
  for (std::size_t p = 0; p + 1 < r; ++p) tables[r + p] = {trans, Matrix(d, 0)};
  return SdppModel(std::move(tree), std::move(tables), d);
}

struct CalibratedSdpp {
  SdppModel model;
  Matrix c;
  DualEigenbasis eigen;
  double scale = 1.0;
  double expected_size = 0.0;  // tr(K) after scaling
};

inline CalibratedSdpp calibrate(const SdppModel& model, double target) {
  const Matrix c0 = compute_dual_c(model);
  const auto spec = SpectralDecomposition::of(c0);
  CalibratedSdpp out;
  out.scale = calibrate_expected_size(spec.eigenvalues, target);
  out.model = scale_model(model, out.scale);
  out.c = compute_dual_c(out.model);
  out.eigen = DualEigenbasis::of(out.c);
  out.expected_size =
      (out.eigen.eigenvalues.array() / (out.eigen.eigenvalues.array() + 1.0)).sum();
  return out;
}

/// Mean over pairs of the mean absolute position difference.
inline double mean_pairwise_distance(const std::vector<Structure>& ys) {
  if (ys.size() < 2) return 0.0;
  double s = 0.0;
  std::size_t pairs = 0;
  for (std::size_t i = 0; i < ys.size(); ++i) {
    for (std::size_t j = i + 1; j < ys.size(); ++j) {
      double d = 0.0;
      for (std::size_t r = 0; r < ys[i].size(); ++r) {
        d += std::abs(static_cast<double>(ys[i][r]) - static_cast<double>(ys[j][r]));
      }
      s += d / static_cast<double>(ys[i].size());
      ++pairs;
    }
  }
  return s / static_cast<double>(pairs);
}

// Geographic paths ----------------------------------------------------------

struct City {
  std::string name;
  double lat = 0.0;
  double lon = 0.0;
  double weight = 0.0;
};

/// CSV rows name,lat,lon,weight; an optional header row starting with
/// "name" is skipped. Errors name the offending line.
inline std::vector<City> parse_cities(std::istream& in) {
  std::vector<City> cities;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.find_first_not_of(" \t") == std::string::npos) continue;
    std::vector<std::string> cells;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    if (lineno == 1 && !cells.empty() && cells[0] == "name") continue;
    const std::string where = "line " + std::to_string(lineno) + ": ";
    if (cells.size() != 4) fail(ErrorCode::kParseError, where + "expected name,lat,lon,weight");
    City c;
    c.name = cells[0];
    try {
      std::size_t pos = 0;
      c.lat = std::stod(cells[1], &pos);
      if (pos != cells[1].size()) throw std::invalid_argument("lat");
      c.lon = std::stod(cells[2], &pos);
      if (pos != cells[2].size()) throw std::invalid_argument("lon");
      c.weight = std::stod(cells[3], &pos);
      if (pos != cells[3].size()) throw std::invalid_argument("weight");
    } catch (const std::exception&) {
      fail(ErrorCode::kParseError, where + "malformed number");
    }
    if (std::abs(c.lat) > 90.0 || std::abs(c.lon) > 180.0 || !(c.weight > 0.0)) {
      fail(ErrorCode::kParseError, where + "coordinates out of range or non-positive weight");
    }
    cities.push_back(std::move(c));
  }
  if (cities.empty()) fail(ErrorCode::kParseError, "no cities");
  return cities;
}

inline std::vector<City> load_cities(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorCode::kParseError, "cannot open " + path);
  return parse_cities(in);
}

inline double haversine_km(const City& a, const City& b) {
  constexpr double kRad = std::numbers::pi / 180.0;
  const double dlat = (b.lat - a.lat) * kRad;
  const double dlon = (b.lon - a.lon) * kRad;
  const double h = std::sin(dlat / 2) * std::sin(dlat / 2) +
                   std::cos(a.lat * kRad) * std::cos(b.lat * kRad) * std::sin(dlon / 2) * std::sin(dlon / 2);
  return 2.0 * 6371.0 * std::asin(std::min(1.0, std::sqrt(h)));
}

/// Compass bucket of the initial bearing from a to b: 0 N, 1 E, 2 S, 3 W.
inline std::size_t bearing_bucket(const City& a, const City& b) {
  constexpr double kRad = std::numbers::pi / 180.0;
  const double y = std::sin((b.lon - a.lon) * kRad) * std::cos(b.lat * kRad);
  const double x = std::cos(a.lat * kRad) * std::sin(b.lat * kRad) -
                   std::sin(a.lat * kRad) * std::cos(b.lat * kRad) * std::cos((b.lon - a.lon) * kRad);
  double deg = std::atan2(y, x) / kRad;
  if (deg < 0) deg += 360.0;
  return static_cast<std::size_t>(std::fmod(deg + 45.0, 360.0) / 90.0) % 4;
}

struct PathsConfig {
  std::size_t stops = 4;          // R
  double distance_scale = 0.0;    // 0: mean inter-city distance / 4
  double popularity_power = 0.5;  // unary quality weight^power
  double feature_offset = 0.0;    // 0: a quarter of the mean inter-city distance
};

/// Label of (city, arrival direction); direction 4 marks the first stop.
inline constexpr std::size_t kDirections = 5;
inline constexpr std::size_t kOrigin = 4;

inline SdppModel paths_model(const std::vector<City>& cities, const PathsConfig& config = {}) {
  const std::size_t n = cities.size();
  const std::size_t m = n * kDirections;
  Matrix dist(static_cast<Index>(n), static_cast<Index>(n));
  double mean = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      dist(static_cast<Index>(i), static_cast<Index>(j)) = haversine_km(cities[i], cities[j]);
      mean += dist(static_cast<Index>(i), static_cast<Index>(j));
    }
  }
  mean = n > 1 ? mean / static_cast<double>(n * (n - 1)) : 1.0;
  if (!(mean > 0.0)) mean = 1.0;
  const double scale = config.distance_scale > 0.0 ? config.distance_scale : mean / 4.0;
  const double offset = config.feature_offset > 0.0 ? config.feature_offset : 0.25 * mean;

  Matrix city_phi(static_cast<Index>(n), static_cast<Index>(n));
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      city_phi(static_cast<Index>(j), static_cast<Index>(i)) =
          1.0 / (dist(static_cast<Index>(i), static_cast<Index>(j)) + offset);
    }
    city_phi.col(static_cast<Index>(i)).normalize();
  }

  const std::size_t r = config.stops;
  FactorTree tree = FactorTree::chain(r, m);
  std::vector<FactorTable> tables(tree.factor_count());
  for (std::size_t p = 0; p < r; ++p) {
    Vector q = Vector::Zero(static_cast<Index>(m));
    Matrix phi(static_cast<Index>(n), static_cast<Index>(m));
    for (std::size_t c = 0; c < n; ++c) {
      for (std::size_t d = 0; d < kDirections; ++d) {
        const Index label = static_cast<Index>(c * kDirections + d);
        const bool allowed = (p == 0) == (d == kOrigin);
        q(label) = allowed ? std::pow(cities[c].weight, config.popularity_power) : 0.0;
        phi.col(label) = city_phi.col(static_cast<Index>(c));
      }
    }
    tables[p] = {q, phi};
  }
  Vector trans = Vector::Zero(static_cast<Index>(m * m));
  for (std::size_t a = 0; a < m; ++a) {
    const std::size_t ca = a / kDirections, da = a % kDirections;
    for (std::size_t b = 0; b < m; ++b) {
      const std::size_t cb = b / kDirections, db = b % kDirections;
      if (ca == cb || db == kOrigin) continue;
      const std::size_t heading = bearing_bucket(cities[ca], cities[cb]);
      if (db != heading) continue;
      // No leaving in the direction one arrived from.
      if (da != kOrigin && heading == (da + 2) % 4) continue;
      trans(static_cast<Index>(a + b * m)) =
          std::exp(-dist(static_cast<Index>(ca), static_cast<Index>(cb)) / scale);
    }
  }
  for (std::size_t p = 0; p + 1 < r; ++p) {
    tables[r + p] = {trans, Matrix(static_cast<Index>(n), 0)};
  }
  SdppModel model(std::move(tree), std::move(tables), static_cast<Index>(n));
  if (!(total_squared_quality(model) > 0.0)) {
    fail(ErrorCode::kDegenerateModel, "no path has positive quality (all transitions are zero)");
  }
  return model;
}

inline std::vector<std::size_t> path_cities(const Structure& y) {
  std::vector<std::size_t> out;
  for (auto label : y) out.push_back(label / kDirections);
  return out;
}

}  // namespace dpp
