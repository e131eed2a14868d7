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

// File formats: matrix CSV, JSON model documents, JSON-lines training
// data, mixture data and factor-tree documents.

#pragma once

#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "dpp/learning.hpp"
#include "dpp/projection.hpp"
#include "dpp/sdpp.hpp"

namespace dpp {

using Json = nlohmann::json;

inline constexpr const char* kSchemaVersion = "1";

inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorCode::kParseError, "cannot open " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

/// Comma-separated rows, no header.
inline Matrix parse_matrix_csv(const std::string& text) {
  std::vector<std::vector<double>> rows;
  std::stringstream in(text);
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.find_first_not_of(" \t") == std::string::npos) continue;
    std::vector<double> row;
    std::stringstream ls(line);
    std::string cell;
    while (std::getline(ls, cell, ',')) {
      try {
        std::size_t pos = 0;
        row.push_back(std::stod(cell, &pos));
        if (cell.find_first_not_of(" \t", pos) != std::string::npos) throw std::invalid_argument(cell);
      } catch (const std::exception&) {
        fail(ErrorCode::kParseError, "line " + std::to_string(lineno) + ": malformed number");
      }
    }
    if (!rows.empty() && row.size() != rows.front().size()) {
      fail(ErrorCode::kParseError, "line " + std::to_string(lineno) + ": ragged row");
    }
    rows.push_back(std::move(row));
  }
  Matrix m(static_cast<Index>(rows.size()), rows.empty() ? 0 : static_cast<Index>(rows[0].size()));
  for (std::size_t i = 0; i < rows.size(); ++i) {
    for (std::size_t j = 0; j < rows[i].size(); ++j) m(static_cast<Index>(i), static_cast<Index>(j)) = rows[i][j];
  }
  return m;
}

namespace detail {

template <class Fn>
auto json_guard(const std::string& what, Fn&& fn) -> decltype(fn()) {
  try {
    return fn();
  } catch (const Error&) {
    throw;
  } catch (const std::exception& e) {
    fail(ErrorCode::kParseError, what + ": " + e.what());
  }
}

inline Json parse_json(const std::string& text, const std::string& what) {
  return json_guard(what, [&] { return Json::parse(text); });
}

}  // namespace detail

inline Vector json_vector(const Json& j) {
  const auto v = j.get<std::vector<double>>();
  return Eigen::Map<const Vector>(v.data(), static_cast<Index>(v.size()));
}

/// Rows of a JSON array of arrays.
inline Matrix json_rows(const Json& j) {
  const auto rows = j.get<std::vector<std::vector<double>>>();
  const Index cols = rows.empty() ? 0 : static_cast<Index>(rows[0].size());
  Matrix m(static_cast<Index>(rows.size()), cols);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (static_cast<Index>(rows[i].size()) != cols) fail(ErrorCode::kParseError, "ragged matrix");
    for (Index c = 0; c < cols; ++c) m(static_cast<Index>(i), c) = rows[i][static_cast<std::size_t>(c)];
  }
  return m;
}

/// A JSON list of vectors read as matrix columns.
inline Matrix json_columns(const Json& j) { return json_rows(j).transpose(); }

inline Json matrix_rows_json(const Matrix& m) {
  Json out = Json::array();
  for (Index i = 0; i < m.rows(); ++i) {
    Json row = Json::array();
    for (Index c = 0; c < m.cols(); ++c) row.push_back(m(i, c));
    out.push_back(std::move(row));
  }
  return out;
}

inline Json vector_json(const Vector& v) { return std::vector<double>(v.data(), v.data() + v.size()); }

inline Json subset_json(const Subset& s) { return s.items(); }

inline Subset json_subset(const Json& j, std::size_t n) {
  return Subset::of(j.get<std::vector<std::size_t>>(), n);
}

// Factor-tree documents -----------------------------------------------------

/// Projected models (unit_features = false) keep their feature norms.
inline SdppModel parse_sdpp(const Json& j, bool unit_features = true) {
  return detail::json_guard("sdpp document", [&] {
    const auto r = j.at("R").get<std::size_t>();
    const auto m = j.at("M").get<std::size_t>();
    std::vector<std::vector<std::size_t>> scopes;
    std::vector<FactorTable> tables;
    Index d = j.contains("D") ? j.at("D").get<Index>() : -1;
    for (const auto& f : j.at("factors")) {
      scopes.push_back(f.at("parts").get<std::vector<std::size_t>>());
      FactorTable t;
      t.q = json_vector(f.at("q"));
      if (f.contains("phi") && !f.at("phi").empty()) {
        t.phi = json_columns(f.at("phi"));
        if (d < 0) d = t.phi.rows();
      }
      tables.push_back(std::move(t));
    }
    if (d < 0) fail(ErrorCode::kParseError, "feature dimension unknown (no phi and no D)");
    for (auto& t : tables) {
      if (t.phi.cols() == 0) t.phi.resize(d, 0);
    }
    return SdppModel(FactorTree(r, m, std::move(scopes)), std::move(tables), d, unit_features);
  });
}

inline Json sdpp_json(const SdppModel& model) {
  Json out{{"R", model.parts()}, {"M", model.labels()}, {"D", model.dim()}};
  Json factors = Json::array();
  for (std::size_t f = 0; f < model.tree().factor_count(); ++f) {
    const auto& t = model.tables()[f];
    Json jf{{"parts", model.tree().scope(f)}, {"q", vector_json(t.q)}};
    jf["phi"] = t.has_features() ? matrix_rows_json(t.phi.transpose()) : Json::array();
    factors.push_back(std::move(jf));
  }
  out["factors"] = std::move(factors);
  return out;
}

// Model documents -----------------------------------------------------------

struct ModelDocument {
  std::string schema_version = kSchemaVersion;
  std::optional<Matrix> l;
  std::optional<QualityDiversity> qd;
  std::optional<SdppModel> sdpp;
  std::optional<std::size_t> k;
  std::optional<std::pair<std::size_t, std::uint64_t>> projection;  // (d, seed)
  std::optional<Json> projected_from;  // set on already-projected payloads

  /// Unstructured kernel, after any requested projection.
  LEnsemble ensemble() const {
    if (l) return LEnsemble::from_matrix(*l);
    if (qd) return LEnsemble::from_quality_diversity(projected_qd());
    fail(ErrorCode::kInvalidInput, "model has no unstructured kernel");
  }

  QualityDiversity projected_qd() const {
    if (!qd) fail(ErrorCode::kInvalidInput, "model has no quality/diversity payload");
    if (!projection) return *qd;
    const auto p = ProjectionMatrix::draw(static_cast<Index>(projection->first), qd->dim(), projection->second);
    return project_features(p, *qd);
  }

  SdppModel structured() const {
    if (!sdpp) fail(ErrorCode::kInvalidInput, "model has no sdpp payload");
    if (!projection) return *sdpp;
    const auto p = ProjectionMatrix::draw(static_cast<Index>(projection->first), sdpp->dim(), projection->second);
    return project_features(p, *sdpp);
  }

  std::size_t size() const {
    if (l) return static_cast<std::size_t>(l->rows());
    if (qd) return qd->size();
    return 0;
  }
};

/// Documents written by a projection carry "projected_from" and are exempt
/// from the unit-norm feature check.
inline ModelDocument parse_model(const Json& j) {
  return detail::json_guard("model document", [&] {
    ModelDocument doc;
    if (!j.is_object()) fail(ErrorCode::kParseError, "model document must be an object");
    if (j.contains("schema_version")) doc.schema_version = j.at("schema_version").get<std::string>();
    const int payloads = static_cast<int>(j.contains("L")) + static_cast<int>(j.contains("quality")) +
                         static_cast<int>(j.contains("sdpp"));
    if (payloads != 1) fail(ErrorCode::kInvalidInput, "exactly one model payload required");
    const bool projected = j.contains("projected_from");
    if (projected) doc.projected_from = j.at("projected_from");
    if (j.contains("L")) {
      Matrix l = json_rows(j.at("L"));
      if (j.contains("n") && j.at("n").get<Index>() != l.rows()) {
        fail(ErrorCode::kDimensionMismatch, "n disagrees with L");
      }
      doc.l = LEnsemble::from_matrix(l).matrix();
    } else if (j.contains("quality")) {
      Vector q = json_vector(j.at("quality"));
      Matrix phi = json_columns(j.at("features"));
      doc.qd = projected ? QualityDiversity::unnormalized(std::move(q), std::move(phi))
                         : QualityDiversity::make(std::move(q), std::move(phi));
    } else {
      doc.sdpp = parse_sdpp(j.at("sdpp"), !projected);
    }
    if (j.contains("k")) doc.k = j.at("k").get<std::size_t>();
    if (j.contains("projection")) {
      const auto& p = j.at("projection");
      doc.projection = {p.at("d").get<std::size_t>(), p.at("seed").get<std::uint64_t>()};
    }
    return doc;
  });
}

inline Json model_json(const ModelDocument& doc) {
  Json out{{"schema_version", doc.schema_version}};
  if (doc.l) {
    out["n"] = doc.l->rows();
    out["L"] = matrix_rows_json(*doc.l);
  } else if (doc.qd) {
    out["quality"] = vector_json(doc.qd->quality);
    out["features"] = matrix_rows_json(doc.qd->features.transpose());
  } else if (doc.sdpp) {
    out["sdpp"] = sdpp_json(*doc.sdpp);
  }
  if (doc.k) out["k"] = *doc.k;
  if (doc.projection) out["projection"] = {{"d", doc.projection->first}, {"seed", doc.projection->second}};
  if (doc.projected_from) out["projected_from"] = *doc.projected_from;
  return out;
}

/// Loads a model from JSON, or from CSV when the path ends in ".csv".
inline ModelDocument load_model(const std::string& path) {
  const std::string text = read_file(path);
  if (path.size() >= 4 && path.substr(path.size() - 4) == ".csv") {
    ModelDocument doc;
    doc.l = LEnsemble::from_matrix(parse_matrix_csv(text)).matrix();
    return doc;
  }
  return parse_model(detail::parse_json(text, path));
}

// Training data --------------------------------------------------------------

/// One JSON object per line: {"f": [f_1, ...], "phi": [phi_1, ...], "y": [...]}.
inline std::vector<ConditionalInstance> parse_training(const std::string& text) {
  std::vector<ConditionalInstance> out;
  std::stringstream in(text);
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    const std::string where = "line " + std::to_string(lineno);
    const Json j = detail::parse_json(line, where);
    out.push_back(detail::json_guard(where, [&] {
      ConditionalInstance inst;
      inst.f = json_columns(j.at("f"));
      inst.phi = json_columns(j.at("phi"));
      inst.y = json_subset(j.at("y"), static_cast<std::size_t>(inst.f.cols()));
      inst.validate();
      return inst;
    }));
  }
  return out;
}

inline std::string training_line(const ConditionalInstance& inst) {
  Json j{{"f", matrix_rows_json(inst.f.transpose())},
         {"phi", matrix_rows_json(inst.phi.transpose())},
         {"y", subset_json(inst.y)}};
  return j.dump();
}

struct MixtureData {
  std::size_t k = 0;
  std::vector<LEnsemble> experts;
  std::vector<PreferencePair> pairs;
};

/// {"k": K, "experts": [model documents], "pairs": [{"pos": [...], "neg": [...]}]}.
inline MixtureData parse_mixture(const std::string& text) {
  const Json j = detail::parse_json(text, "mixture data");
  return detail::json_guard("mixture data", [&] {
    MixtureData out;
    out.k = j.at("k").get<std::size_t>();
    for (const auto& e : j.at("experts")) out.experts.push_back(parse_model(e).ensemble());
    if (out.experts.empty()) fail(ErrorCode::kInvalidInput, "no experts");
    const std::size_t n = out.experts[0].size();
    for (const auto& e : out.experts) {
      if (e.size() != n) fail(ErrorCode::kDimensionMismatch, "experts disagree on N");
    }
    for (const auto& p : j.at("pairs")) {
      PreferencePair pair{json_subset(p.at("pos"), n), json_subset(p.at("neg"), n)};
      if (pair.preferred.size() != out.k || pair.other.size() != out.k) {
        fail(ErrorCode::kCardinalityMismatch, "every set in a pair must have k items");
      }
      out.pairs.push_back(std::move(pair));
    }
    return out;
  });
}

}  // namespace dpp
