#pragma once

// File formats: instance and matrix JSON, slice and sweep-grid JSON, CSV
// number formatting.

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include <json.hpp>

#include "gbspe/advantage.hpp"
#include "gbspe/estimators.hpp"
#include "gbspe/linalg.hpp"
#include "gbspe/problem.hpp"

namespace gbspe {

/// Reads a whole file; ConfigError if it cannot be opened.
std::string read_text_file(const std::filesystem::path& path);

/// Parses JSON text, converting parse failures into ConfigError naming `source`.
nlohmann::json parse_json(const std::string& text, const std::string& source);

/// {N, K, eigenvalues[], basis[][] (columns are eigenvectors, identity if
/// absent), coefficients{"i1,...,iN": value}}. Missing coefficients are zero.
/// A coefficient vector whose norm is off by more than 1e-9 is rescaled onto
/// the sphere and a warning goes to `warnings`.
ProblemInstance instance_from_json(const nlohmann::json& doc, std::ostream& warnings);
ProblemInstance load_instance(const std::filesystem::path& path, std::ostream& warnings);
nlohmann::json instance_to_json(const ProblemInstance& instance);

/// A JSON array of rows, or an object with a "matrix" field holding one.
SymmetricMatrix matrix_from_json(const nlohmann::json& doc);
SymmetricMatrix load_matrix(const std::filesystem::path& path);

/// {"slices": [{degree, mu, v_mc, v_gbs}, ...]} or the bare array.
std::vector<SliceInput> slices_from_json(const nlohmann::json& doc);

/// {"cells": [{N, K, mode}, ...], n1?, n2?, seed?, budget?, normalization?}.
struct SweepGrid {
  std::vector<SweepCell> cells;
  AdvantageConfig base;
};
SweepGrid sweep_grid_from_json(const nlohmann::json& doc);

/// Shortest "%.17g" rendering; "nan", "inf", "-inf" for non-finite values.
std::string format_double(double value);

/// Finite doubles as numbers, non-finite as null.
nlohmann::json json_number(double value);

void write_records_csv(std::ostream& out, const std::vector<TrialRecord>& records);
void write_sweep_csv(std::ostream& out, const std::vector<SweepRow>& rows);
void write_sweep_timings_csv(std::ostream& out, const std::vector<SweepRow>& rows);

}  // namespace gbspe
