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

// dppctl: command-line front end. Every subcommand reads its inputs, calls
// the library and prints JSON; no numerics live here.

#include <cstdint>
#include <iostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "dpp/dpp.hpp"

namespace {

using dpp::Json;

// Exit codes.
constexpr int kOk = 0;
constexpr int kFailure = 1;
constexpr int kUsage = 2;
constexpr int kValidation = 3;
constexpr int kInfeasible = 4;

int exit_code(dpp::ErrorCode code) {
  using dpp::ErrorCode;
  if (dpp::is_validation_error(code) || code == ErrorCode::kCardinalityMismatch) return kValidation;
  switch (code) {
    case ErrorCode::kZeroProbabilityCondition:
    case ErrorCode::kInfeasibleCardinality:
    case ErrorCode::kInfeasibleWindow:
    case ErrorCode::kDegenerateModel:
    case ErrorCode::kDiverged:
    case ErrorCode::kOverBudget:
      return kInfeasible;
    default:
      return kFailure;
  }
}

void emit(const Json& j) { std::cout << j.dump() << '\n'; }

Json error_json(std::string_view code, const std::string& message) {
  return {{"error", {{"code", code}, {"message", message}}}};
}

Json value_json(const dpp::LogValue& v) { return {{"log_value", v.log_value}, {"value", v.value}}; }

/// "0,3,5" -> {0, 3, 5}; the empty string is the empty set.
dpp::Subset parse_items(const std::string& text, std::size_t n) {
  std::vector<std::size_t> items;
  std::stringstream ss(text);
  std::string cell;
  while (std::getline(ss, cell, ',')) {
    if (cell.find_first_not_of(" ") == std::string::npos) continue;
    std::size_t pos = 0;
    unsigned long long v = 0;
    try {
      v = std::stoull(cell, &pos);
    } catch (const std::exception&) {
      pos = 0;
    }
    if (pos == 0 || cell.find_first_not_of(" ", pos) != std::string::npos) {
      dpp::fail(dpp::ErrorCode::kParseError, "bad item list '" + text + "'");
    }
    items.push_back(static_cast<std::size_t>(v));
  }
  return dpp::Subset::of(std::move(items), n);
}

std::vector<double> parse_numbers(const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string cell;
  while (std::getline(ss, cell, ',')) {
    std::size_t pos = 0;
    try {
      out.push_back(std::stod(cell, &pos));
    } catch (const std::exception&) {
      pos = 0;
    }
    if (pos == 0) dpp::fail(dpp::ErrorCode::kParseError, "bad number list '" + text + "'");
  }
  return out;
}

struct Options {
  std::size_t jobs = 1;
  std::string model;
  std::string data;
  std::string cities;
  std::string set;
  std::string include;
  std::string exclude;
  std::string costs;
  std::string formula = "l";
  std::string optimizer = "gd";
  std::string suite = "all";
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> k;
  std::optional<std::size_t> d;
  std::size_t count = 1;
  std::size_t samples = 100;
  std::size_t trials = 100;
  std::size_t max_iterations = 2000;
  std::size_t positions = 50;
  std::size_t steps = 50;
  std::size_t features = 50;
  std::size_t stops = 4;
  double budget = std::numeric_limits<double>::infinity();
  double l2 = 0.0;
  double tol = 1e-6;
  double gamma = 1.0;
  double eps = 0.3;
  double delta = 0.2;
  double target = 5.0;
  double min_length = 0.0;
  double max_length = std::numeric_limits<double>::infinity();
  bool dual = false;
  bool complement = false;
};

/// The requested seed, or a fresh one that is printed before any output.
dpp::Rng seeded(const Options& o) {
  std::uint64_t seed = 0;
  if (o.seed) {
    seed = *o.seed;
  } else {
    std::random_device rd;
    seed = (static_cast<std::uint64_t>(rd()) << 32) ^ rd();
  }
  emit({{"seed", seed}, {"rng", std::string(dpp::Rng::kAlgorithm)}});
  return dpp::Rng(seed);
}

std::size_t required_k(const Options& o, const dpp::ModelDocument& doc) {
  if (o.k) return *o.k;
  if (doc.k) return *doc.k;
  dpp::fail(dpp::ErrorCode::kInvalidInput, "k is required (--k or a model \"k\" field)");
}

dpp::LikelihoodFormula formula(const std::string& name) {
  if (name == "l") return dpp::LikelihoodFormula::kLRatio;
  if (name == "k-mixed") return dpp::LikelihoodFormula::kKMixed;
  if (name == "k-signed") return dpp::LikelihoodFormula::kKSigned;
  dpp::fail(dpp::ErrorCode::kInvalidInput, "unknown formula '" + name + "'");
}

Json structures_json(const std::vector<dpp::Structure>& ys) {
  Json out = Json::array();
  for (const auto& y : ys) out.push_back(y);
  return out;
}

// Subcommands -----------------------------------------------------------------

void cmd_normalize(const Options& o) {
  emit(value_json(dpp::normalizer(dpp::load_model(o.model).ensemble())));
}

void cmd_prob(const Options& o) {
  const auto ens = dpp::load_model(o.model).ensemble();
  emit(value_json(dpp::set_probability(ens, parse_items(o.set, ens.size()), formula(o.formula))));
}

void cmd_marginal(const Options& o) {
  const auto ens = dpp::load_model(o.model).ensemble();
  const auto k = dpp::l_to_k(ens.spectrum());
  const auto a = parse_items(o.set, ens.size());
  emit(value_json(o.complement ? dpp::complement_marginal(k, a) : dpp::marginal(k, a)));
}

void cmd_condition(const Options& o) {
  const auto ens = dpp::load_model(o.model).ensemble();
  dpp::ConditionSpec spec{parse_items(o.include, ens.size()), parse_items(o.exclude, ens.size())};
  const auto cond = dpp::condition(ens, spec);
  Json out{{"items", cond.items}, {"L", dpp::matrix_rows_json(cond.ensemble.matrix())},
           {"condition", value_json(dpp::partial_marginal(ens, spec))}};
  if (!o.set.empty()) {
    // The remaining items of a full set, in conditional-model indices.
    const auto y = parse_items(o.set, ens.size());
    std::vector<std::size_t> local;
    for (std::size_t j = 0; j < cond.items.size(); ++j) {
      if (y.contains(cond.items[j])) local.push_back(j);
    }
    for (auto i : spec.include) {
      if (!y.contains(i)) dpp::fail(dpp::ErrorCode::kInvalidInput, "set must contain the included items");
    }
    for (auto i : spec.exclude) {
      if (y.contains(i)) dpp::fail(dpp::ErrorCode::kInvalidInput, "set contains an excluded item");
    }
    out["probability"] = value_json(dpp::set_probability(cond.ensemble, dpp::Subset(local)));
  }
  emit(out);
}

void cmd_sample(const Options& o) {
  const auto doc = dpp::load_model(o.model);
  auto rng = seeded(o);
  if (o.dual) {
    if (!doc.qd) dpp::fail(dpp::ErrorCode::kInvalidInput, "--dual needs a quality/features model");
    const auto dual = dpp::build_dual(doc.projected_qd());
    const auto eigen = dpp::DualEigenbasis::of(dual);
    for (std::size_t t = 0; t < o.count; ++t) emit({{"items", dpp::dual_sample(eigen, dual, rng).items()}});
    return;
  }
  const auto spec = doc.ensemble().spectrum();
  for (std::size_t t = 0; t < o.count; ++t) emit({{"items", dpp::sample(spec, rng).items()}});
}

void cmd_ksample(const Options& o) {
  const auto doc = dpp::load_model(o.model);
  const auto k = required_k(o, doc);
  const auto spec = doc.ensemble().spectrum();
  auto rng = seeded(o);
  for (std::size_t t = 0; t < o.count; ++t) emit({{"items", dpp::kdpp_sample(spec, k, rng).items()}});
}

void cmd_knormalize(const Options& o) {
  const auto doc = dpp::load_model(o.model);
  emit(value_json(dpp::kdpp_normalizer(doc.ensemble().spectrum().eigenvalues, required_k(o, doc))));
}

void cmd_kmarginals(const Options& o) {
  const auto doc = dpp::load_model(o.model);
  emit({{"marginals", dpp::vector_json(dpp::kdpp_singleton_marginals(doc.ensemble().spectrum(), required_k(o, doc)))}});
}

dpp::Vector costs_for(const Options& o, std::size_t n) {
  if (o.costs.empty()) return dpp::Vector::Ones(static_cast<dpp::Index>(n));
  const auto c = parse_numbers(o.costs);
  if (c.size() != n) dpp::fail(dpp::ErrorCode::kDimensionMismatch, "one cost per item required");
  return Eigen::Map<const dpp::Vector>(c.data(), static_cast<dpp::Index>(n));
}

void cmd_map(const Options& o) {
  const auto ens = dpp::load_model(o.model).ensemble();
  const auto r = dpp::greedy_map(ens, costs_for(o, ens.size()), o.budget);
  emit({{"items", r.items.items()}, {"order", r.order}, {"log_det", r.log_det}, {"total_cost", r.total_cost}});
}

void cmd_mbr(const Options& o) {
  const auto doc = dpp::load_model(o.model);
  const auto spec = doc.ensemble().spectrum();
  const auto k = o.k ? o.k : doc.k;
  dpp::MbrOptions opts;
  opts.samples = o.samples;
  if (o.min_length > 0.0 || std::isfinite(o.max_length)) {
    dpp::LengthWindow w;
    w.min_length = o.min_length;
    w.max_length = o.max_length;
    opts.window = w;
  }
  auto rng = seeded(o);
  const auto y = dpp::mbr_decode(
      [&](dpp::Rng& g) { return k ? dpp::kdpp_sample(spec, *k, g) : dpp::sample(spec, g); }, opts, rng);
  emit({{"items", y.items()}});
}

void cmd_learn(const Options& o) {
  auto data = dpp::LearningData::make(dpp::parse_training(dpp::read_file(o.data)));
  if (data.instances.empty()) dpp::fail(dpp::ErrorCode::kInvalidInput, "no usable training instances");
  dpp::TrainOptions opts;
  opts.objective.l2 = o.l2;
  opts.objective.jobs = o.jobs;
  opts.tol = o.tol;
  opts.max_iterations = o.max_iterations;
  if (o.optimizer == "lbfgs") {
    opts.optimizer = dpp::Optimizer::kLbfgs;
  } else if (o.optimizer != "gd") {
    dpp::fail(dpp::ErrorCode::kInvalidInput, "unknown optimizer '" + o.optimizer + "'");
  }
  const auto m = data.instances.front().f.rows();
  const auto r = dpp::train_quality(data, dpp::Vector::Zero(m), opts);
  emit({{"theta", dpp::vector_json(r.theta)}, {"log_likelihood", r.objective}, {"grad_norm", r.grad_norm},
        {"iterations", r.iterations}, {"converged", r.converged}, {"dropped", data.dropped}});
}

void cmd_mixture_learn(const Options& o) {
  const auto data = dpp::parse_mixture(dpp::read_file(o.data));
  const std::size_t k = o.k ? *o.k : data.k;
  const auto deltas = dpp::mixture_deltas(data.experts, k, data.pairs, o.gamma);
  dpp::MixtureOptions opts;
  opts.max_iterations = o.max_iterations;
  const auto r = dpp::train_mixture(deltas, opts);
  emit({{"theta", dpp::vector_json(r.theta)}, {"loss", r.loss}, {"iterations", r.iterations}});
}

void cmd_sdpp_sample(const Options& o) {
  const auto doc = dpp::load_model(o.model);
  const auto model = doc.structured();
  const auto k = o.k ? o.k : doc.k;
  const dpp::Matrix c = dpp::compute_dual_c(model);
  const auto eigen = dpp::DualEigenbasis::of(c);
  auto rng = seeded(o);
  for (std::size_t t = 0; t < o.count; ++t) {
    const auto ys = k ? dpp::ksdpp_sample(model, c, eigen, *k, rng) : dpp::sdpp_sample(model, c, eigen, rng);
    emit({{"structures", structures_json(ys)}});
  }
}

void cmd_sdpp_marginals(const Options& o) {
  const auto model = dpp::load_model(o.model).structured();
  const auto eigen = dpp::DualEigenbasis::of(dpp::compute_dual_c(model));
  const auto lam = eigen.eigenvalues.array();
  emit({{"marginals", dpp::matrix_rows_json(dpp::part_marginals(model, eigen, o.jobs))},
        {"expected_size", (lam / (lam + 1.0)).sum()}});
}

void cmd_sdpp_track(const Options& o) {
  dpp::TrackingConfig cfg;
  cfg.positions = o.positions;
  cfg.steps = o.steps;
  cfg.features = o.features;
  cfg.expected_size = o.target;
  const auto cal = dpp::calibrate(dpp::tracking_model(cfg), cfg.expected_size);
  auto rng = seeded(o);
  Json samples = Json::array();
  for (std::size_t t = 0; t < o.count; ++t) {
    samples.push_back(structures_json(dpp::sdpp_sample(cal.model, cal.c, cal.eigen, rng)));
  }
  emit({{"scale", cal.scale},
        {"expected_size", cal.expected_size},
        {"samples", samples},
        {"marginals", dpp::matrix_rows_json(dpp::part_marginals(cal.model, cal.eigen, o.jobs))}});
}

void cmd_sdpp_paths(const Options& o) {
  const auto cities = dpp::load_cities(o.cities);
  dpp::PathsConfig cfg;
  cfg.stops = o.stops;
  const auto model = dpp::paths_model(cities, cfg);
  const dpp::Matrix c = dpp::compute_dual_c(model);
  const auto eigen = dpp::DualEigenbasis::of(c);
  const std::size_t k = o.k.value_or(2);
  auto rng = seeded(o);
  for (std::size_t t = 0; t < o.count; ++t) {
    Json paths = Json::array();
    for (const auto& y : dpp::ksdpp_sample(model, c, eigen, k, rng)) {
      Json names = Json::array();
      for (auto city : dpp::path_cities(y)) names.push_back(cities[city].name);
      paths.push_back(names);
    }
    emit({{"paths", paths}});
  }
}

void cmd_project(const Options& o) {
  auto doc = dpp::load_model(o.model);
  if (!o.d) dpp::fail(dpp::ErrorCode::kInvalidInput, "--d is required");
  const std::uint64_t seed = o.seed.value_or(0);
  if (!o.seed) dpp::fail(dpp::ErrorCode::kInvalidInput, "--seed is required");
  doc.projection = {*o.d, seed};
  dpp::ModelDocument out;
  out.k = doc.k;
  if (doc.qd) {
    out.qd = doc.projected_qd();
  } else if (doc.sdpp) {
    out.sdpp = doc.structured();
  } else {
    dpp::fail(dpp::ErrorCode::kInvalidInput, "projection needs diversity features");
  }
  out.projected_from = Json{{"d", *o.d}, {"seed", seed}, {"rng", std::string(dpp::Rng::kAlgorithm)}};
  emit(dpp::model_json(out));
}

void cmd_project_analyze(const Options& o) {
  const auto doc = dpp::load_model(o.model);
  if (!doc.qd) dpp::fail(dpp::ErrorCode::kInvalidInput, "project-analyze needs a quality/features model");
  const std::size_t k = required_k(o, doc);
  const std::uint64_t seed = seeded(o).seed();
  const auto r = dpp::bound_validation(*doc.qd, k, o.eps, o.delta, o.trials, seed, o.d.value_or(0), o.jobs);
  emit({{"d", r.d}, {"mean_l1", r.mean_l1}, {"bound", r.bound}, {"satisfied_fraction", r.satisfied_fraction}});
}

int cmd_oracle_check(const Options& o) {
  const std::uint64_t seed = seeded(o).seed();
  bool all = true;
  for (const auto& r : dpp::run_checks(o.suite, seed)) {
    all = all && r.passed;
    emit({{"suite", r.suite}, {"check", r.name}, {"error", r.error}, {"tolerance", r.tolerance},
          {"status", r.passed ? "pass" : "fail"}});
  }
  emit({{"all_passed", all}});
  return all ? kOk : kFailure;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Determinantal point process toolkit"};
  app.require_subcommand(1);
  app.fallthrough();
  Options o;
  app.add_option("--jobs", o.jobs, "Worker threads for parallel trials")->check(CLI::PositiveNumber);

  const auto model = [&](CLI::App* s) { s->add_option("--model", o.model, "Model file (JSON, or CSV L matrix)")->required(); };
  const auto seed = [&](CLI::App* s) { s->add_option("--seed", o.seed, "RNG seed (generated and printed when absent)"); };
  const auto count = [&](CLI::App* s) { s->add_option("--count", o.count, "Number of samples"); };
  const auto k = [&](CLI::App* s, bool required) {
    auto* opt = s->add_option("--k", o.k, "Cardinality");
    if (required) opt->required();
  };
  int status = kOk;
  std::vector<std::pair<CLI::App*, std::function<void()>>> handlers;
  const auto sub = [&](const std::string& name, const std::string& help, std::function<void()> fn) {
    auto* s = app.add_subcommand(name, help);
    handlers.emplace_back(s, std::move(fn));
    return s;
  };

  auto* s = sub("normalize", "log det(L + I)", [&] { cmd_normalize(o); });
  model(s);
  s = sub("prob", "P(Y = set)", [&] { cmd_prob(o); });
  model(s);
  s->add_option("--set", o.set, "Items, comma separated");
  s->add_option("--formula", o.formula, "l | k-mixed | k-signed");
  s = sub("marginal", "P(set within Y), or P(set disjoint from Y)", [&] { cmd_marginal(o); });
  model(s);
  s->add_option("--set", o.set, "Items, comma separated");
  s->add_flag("--complement", o.complement, "Exclusion probability");
  s = sub("condition", "Condition on included and excluded items", [&] { cmd_condition(o); });
  model(s);
  s->add_option("--include", o.include, "Items known to be in Y");
  s->add_option("--exclude", o.exclude, "Items known to be outside Y");
  s->add_option("--set", o.set, "Full set whose conditional probability to report");
  s = sub("sample", "Exact samples", [&] { cmd_sample(o); });
  model(s);
  seed(s);
  count(s);
  s->add_flag("--dual", o.dual, "Sample through the dual representation");
  s = sub("ksample", "Samples of exactly k items", [&] { cmd_ksample(o); });
  model(s);
  seed(s);
  count(s);
  k(s, false);
  s = sub("knormalize", "e_k of the spectrum", [&] { cmd_knormalize(o); });
  model(s);
  k(s, false);
  s = sub("kmarginals", "Singleton marginals of the k-DPP", [&] { cmd_kmarginals(o); });
  model(s);
  k(s, false);
  s = sub("map", "Budgeted greedy MAP", [&] { cmd_map(o); });
  model(s);
  s->add_option("--budget", o.budget, "Cost budget");
  s->add_option("--costs", o.costs, "Per-item costs, comma separated (default 1)");
  s = sub("mbr", "Minimum Bayes risk decoding", [&] { cmd_mbr(o); });
  model(s);
  seed(s);
  k(s, false);
  s->add_option("--samples", o.samples, "Number of model samples");
  s->add_option("--min-length", o.min_length, "Smallest admissible set size");
  s->add_option("--max-length", o.max_length, "Largest admissible set size");
  s = sub("learn", "Maximum-likelihood quality weights", [&] { cmd_learn(o); });
  s->add_option("--data", o.data, "Training data (JSON lines)")->required();
  s->add_option("--l2", o.l2, "L2 penalty");
  s->add_option("--tol", o.tol, "Gradient tolerance");
  s->add_option("--optimizer", o.optimizer, "gd | lbfgs");
  s->add_option("--max-iter", o.max_iterations, "Iteration cap");
  s = sub("mixture-learn", "Mixture weights over k-DPP experts", [&] { cmd_mixture_learn(o); });
  s->add_option("--data", o.data, "Mixture data (JSON)")->required();
  s->add_option("--gamma", o.gamma, "Loss sharpness");
  s->add_option("--max-iter", o.max_iterations, "Iteration cap");
  k(s, false);
  s = sub("sdpp-sample", "Samples of structures", [&] { cmd_sdpp_sample(o); });
  model(s);
  seed(s);
  count(s);
  k(s, false);
  s = sub("sdpp-marginals", "Part marginals", [&] { cmd_sdpp_marginals(o); });
  model(s);
  s = sub("sdpp-track", "Particle tracking demo", [&] { cmd_sdpp_track(o); });
  seed(s);
  count(s);
  s->add_option("--positions", o.positions, "M");
  s->add_option("--steps", o.steps, "R");
  s->add_option("--features", o.features, "D");
  s->add_option("--target", o.target, "Expected number of trajectories");
  s = sub("sdpp-paths", "Diverse geographic paths", [&] { cmd_sdpp_paths(o); });
  s->add_option("--cities", o.cities, "City file (CSV name,lat,lon,weight)")->required();
  s->add_option("--stops", o.stops, "Stops per path");
  seed(s);
  count(s);
  k(s, false);
  s = sub("project", "Random projection of diversity features", [&] { cmd_project(o); });
  model(s);
  seed(s);
  s->add_option("--d", o.d, "Projected dimension");
  s = sub("project-analyze", "Check the projection L1 bound", [&] { cmd_project_analyze(o); });
  model(s);
  seed(s);
  k(s, false);
  s->add_option("--eps", o.eps, "epsilon");
  s->add_option("--delta", o.delta, "delta");
  s->add_option("--trials", o.trials, "Projection draws");
  s->add_option("--d", o.d, "Dimension (default: the formula value)");
  s = sub("oracle-check", "Brute-force equivalence checks", [&] { status = cmd_oracle_check(o); });
  seed(s);
  s->add_option("--suite", o.suite, "all | kernel | inference | dual | kdpp | sdpp | projection");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    emit(error_json("usage", e.what()));
    return kUsage;
  }
  try {
    for (auto& [cmd, fn] : handlers) {
      if (cmd->parsed()) fn();
    }
  } catch (const dpp::Error& e) {
    emit(error_json(dpp::error_code_name(e.code()), e.what()));
    return exit_code(e.code());
  } catch (const std::exception& e) {
    emit(error_json("internal", e.what()));
    return kFailure;
  }
  return status;
}
