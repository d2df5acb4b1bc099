#include "gbspe/io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <map>
#include <ostream>
#include <sstream>

#include "gbspe/errors.hpp"

namespace gbspe {

namespace {

using nlohmann::json;

const json& require(const json& doc, const char* field, const std::string& where) {
  if (!doc.is_object() || !doc.contains(field)) throw ConfigError(where + ": missing field '" + field + "'");
  return doc.at(field);
}

double as_number(const json& value, const std::string& field) {
  if (!value.is_number()) throw ConfigError(field + ": expected a number");
  return value.get<double>();
}

int as_int(const json& value, const std::string& field) {
  if (!value.is_number_integer()) throw ConfigError(field + ": expected an integer");
  return value.get<int>();
}

std::uint64_t as_count(const json& value, const std::string& field) {
  if (!value.is_number_unsigned() && !(value.is_number_integer() && value.get<std::int64_t>() >= 0))
    throw ConfigError(field + ": expected a nonnegative integer");
  return value.get<std::uint64_t>();
}

DenseMatrix dense_from_rows(const json& rows, const std::string& field) {
  if (!rows.is_array() || rows.empty()) throw ConfigError(field + ": expected a nonempty array of rows");
  const std::size_t n = rows.size();
  DenseMatrix m(n, rows.front().is_array() ? rows.front().size() : 0);
  for (std::size_t i = 0; i < n; ++i) {
    const json& row = rows[i];
    if (!row.is_array() || row.size() != m.cols())
      throw ConfigError(field + ": row " + std::to_string(i) + " has the wrong length");
    for (std::size_t j = 0; j < m.cols(); ++j) m(i, j) = as_number(row[j], field);
  }
  return m;
}

}  // namespace

std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open '" + path.string() + "'");
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

nlohmann::json parse_json(const std::string& text, const std::string& source) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError(source + ": invalid JSON (" + e.what() + ")");
  }
}

ProblemInstance instance_from_json(const nlohmann::json& doc, std::ostream& warnings) {
  const std::string where = "instance";
  const int modes = as_int(require(doc, "N", where), "N");
  const int half_degree = as_int(require(doc, "K", where), "K");
  const ProblemShape shape{modes, half_degree};
  try {
    shape.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("N/K: ") + e.what());
  }

  const json& eig = require(doc, "eigenvalues", where);
  if (!eig.is_array() || eig.size() != static_cast<std::size_t>(modes))
    throw ConfigError("eigenvalues: expected " + std::to_string(modes) + " values");
  std::vector<double> eigenvalues;
  for (const json& v : eig) {
    const double l = as_number(v, "eigenvalues");
    if (!(l > 0.0 && l < 1.0)) throw ConfigError("eigenvalues: every value must lie in (0, 1)");
    eigenvalues.push_back(l);
  }

  DenseMatrix basis = DenseMatrix::identity(static_cast<std::size_t>(modes));
  if (doc.contains("basis")) {
    basis = dense_from_rows(doc.at("basis"), "basis");
    if (basis.rows() != static_cast<std::size_t>(modes) || basis.cols() != basis.rows())
      throw ConfigError("basis: expected an N x N matrix");
  }

  const auto patterns = degree_patterns(static_cast<std::size_t>(modes), 2 * half_degree);
  std::vector<double> coefficients(patterns->size(), 0.0);
  const json& coeffs = require(doc, "coefficients", where);
  if (!coeffs.is_object()) throw ConfigError("coefficients: expected an object keyed by \"i1,...,iN\"");
  for (const auto& [key, value] : coeffs.items()) {
    MultiIndex index;
    try {
      index = MultiIndex::parse(key);
    } catch (const std::invalid_argument& e) {
      throw ConfigError("coefficients: bad key '" + key + "'");
    }
    if (index.size() != static_cast<std::size_t>(modes) || index.degree() != 2 * half_degree)
      throw ConfigError("coefficients: key '" + key + "' is not a degree-2K index of length N");
    const auto it = std::lower_bound(patterns->begin(), patterns->end(), index);
    coefficients[static_cast<std::size_t>(it - patterns->begin())] = as_number(value, "coefficients[" + key + "]");
  }

  double norm2 = 0.0;
  for (double a : coefficients) norm2 += a * a;
  if (!(norm2 > 0.0)) throw ConfigError("coefficients: all zero");
  const double norm = std::sqrt(norm2);
  if (std::abs(norm - 1.0) > 1e-9)
    warnings << "warning: coefficient norm " << format_double(norm) << " rescaled to 1\n";
  for (double& a : coefficients) a /= norm;

  try {
    return ProblemInstance::from_spectrum(shape, std::move(coefficients), std::move(eigenvalues), std::move(basis));
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("instance: ") + e.what());
  }
}

ProblemInstance load_instance(const std::filesystem::path& path, std::ostream& warnings) {
  return instance_from_json(parse_json(read_text_file(path), path.string()), warnings);
}

nlohmann::json instance_to_json(const ProblemInstance& instance) {
  json doc;
  doc["N"] = instance.shape().modes;
  doc["K"] = instance.shape().half_degree;
  doc["eigenvalues"] = instance.eigen().eigenvalues;
  json basis = json::array();
  const DenseMatrix& u = instance.eigen().basis;
  for (std::size_t i = 0; i < u.rows(); ++i) {
    json row = json::array();
    for (std::size_t j = 0; j < u.cols(); ++j) row.push_back(u(i, j));
    basis.push_back(row);
  }
  doc["basis"] = basis;
  json coeffs = json::object();
  for (std::size_t i = 0; i < instance.patterns().size(); ++i)
    coeffs[instance.patterns()[i].to_string()] = instance.coefficients()[i];
  doc["coefficients"] = coeffs;
  return doc;
}

SymmetricMatrix matrix_from_json(const nlohmann::json& doc) {
  const json& rows = doc.is_object() ? require(doc, "matrix", "matrix file") : doc;
  const DenseMatrix m = dense_from_rows(rows, "matrix");
  if (m.rows() != m.cols()) throw ConfigError("matrix: expected a square matrix");
  try {
    return SymmetricMatrix::from_dense(m);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("matrix: ") + e.what());
  }
}

SymmetricMatrix load_matrix(const std::filesystem::path& path) {
  return matrix_from_json(parse_json(read_text_file(path), path.string()));
}

std::vector<SliceInput> slices_from_json(const nlohmann::json& doc) {
  const json& list = doc.is_object() ? require(doc, "slices", "slices file") : doc;
  if (!list.is_array()) throw ConfigError("slices: expected an array");
  std::vector<SliceInput> slices;
  for (const json& item : list) {
    SliceInput s;
    s.degree = as_int(require(item, "degree", "slice"), "degree");
    s.mu = as_number(require(item, "mu", "slice"), "mu");
    s.v_mc = as_number(require(item, "v_mc", "slice"), "v_mc");
    s.v_gbs = as_number(require(item, "v_gbs", "slice"), "v_gbs");
    slices.push_back(s);
  }
  return slices;
}

SweepGrid sweep_grid_from_json(const nlohmann::json& doc) {
  SweepGrid grid;
  const json& cells = require(doc, "cells", "grid file");
  if (!cells.is_array()) throw ConfigError("cells: expected an array");
  for (const json& item : cells) {
    SweepCell cell;
    cell.modes = as_int(require(item, "N", "cell"), "N");
    cell.half_degree = as_int(require(item, "K", "cell"), "K");
    const json& mode = require(item, "mode", "cell");
    if (!mode.is_string()) throw ConfigError("mode: expected a string");
    cell.mode = parse_advantage_mode(mode.get<std::string>());
    grid.cells.push_back(cell);
  }
  if (doc.contains("n1")) grid.base.n1 = as_count(doc.at("n1"), "n1");
  if (doc.contains("n2")) grid.base.n2 = as_count(doc.at("n2"), "n2");
  if (doc.contains("seed")) grid.base.seed = as_count(doc.at("seed"), "seed");
  if (doc.contains("budget")) grid.base.budget = as_number(doc.at("budget"), "budget");
  if (doc.contains("cn_draws")) grid.base.cn_draws = as_count(doc.at("cn_draws"), "cn_draws");
  if (doc.contains("normalization")) {
    const json& n = doc.at("normalization");
    if (!n.is_string()) throw ConfigError("normalization: expected a string");
    grid.base.normalization = parse_normalization(n.get<std::string>());
  }
  return grid;
}

std::string format_double(double value) {
  if (std::isnan(value)) return "nan";
  if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
  char buffer[32];
  std::snprintf(buffer, sizeof buffer, "%.17g", value);
  return buffer;
}

nlohmann::json json_number(double value) {
  if (!std::isfinite(value)) return nullptr;
  return value;
}

void write_records_csv(std::ostream& out, const std::vector<TrialRecord>& records) {
  out << "l,m,vandermonde,V_mc,V_gbs,H,ratio,skipped\n";
  for (const TrialRecord& r : records) {
    out << r.outer << ',' << r.inner << ',' << format_double(r.vandermonde) << ',' << format_double(r.v_mc) << ','
        << format_double(r.v_gbs) << ',' << r.advantage << ',' << format_double(r.ratio) << ','
        << (r.skipped ? 1 : 0) << '\n';
  }
}

void write_sweep_csv(std::ostream& out, const std::vector<SweepRow>& rows) {
  out << "N,K,mode,status,percentage,stderr,trials,skipped,estimated_cost\n";
  for (const SweepRow& r : rows) {
    out << r.cell.modes << ',' << r.cell.half_degree << ',' << to_string(r.cell.mode) << ',' << r.status << ','
        << format_double(r.percentage) << ',' << format_double(r.standard_error) << ',' << r.trials << ','
        << r.skipped << ',' << format_double(r.estimated_cost) << '\n';
  }
}

void write_sweep_timings_csv(std::ostream& out, const std::vector<SweepRow>& rows) {
  out << "N,K,mode,status,runtime_seconds\n";
  for (const SweepRow& r : rows) {
    out << r.cell.modes << ',' << r.cell.half_degree << ',' << to_string(r.cell.mode) << ',' << r.status << ','
        << format_double(r.runtime_seconds) << '\n';
  }
}

}  // namespace gbspe
