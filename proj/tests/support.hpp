#pragma once

#include <cmath>
#include <filesystem>
#include <string>
#include <vector>

#include "gbspe/linalg.hpp"
#include "gbspe/multiindex.hpp"
#include "gbspe/problem.hpp"
#include "gbspe/rng.hpp"
#include "oracles.hpp"

namespace testing {

inline oracle::Matrix to_oracle(const gbspe::SymmetricMatrix& s) {
  const std::size_t n = s.dimension();
  oracle::Matrix m(n, std::vector<double>(n));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) m[i][j] = s(i, j);
  return m;
}

inline std::vector<int> entries(const gbspe::MultiIndex& index) {
  return {index.entries().begin(), index.entries().end()};
}

/// Symmetric matrix with entries uniform on (-1, 1).
inline gbspe::SymmetricMatrix random_symmetric(gbspe::RngStream& rng, std::size_t n) {
  gbspe::SymmetricMatrix s(n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i; j < n; ++j) s.set(i, j, 2.0 * rng.uniform01() - 1.0);
  return s;
}

inline double relative_error(double value, double reference) {
  return std::abs(value - reference) / std::max(std::abs(reference), 1e-300);
}

/// Fixed (N=2, K=1) instance used by the sampling tests.
inline gbspe::ProblemInstance fixed_instance_n2k1() {
  const double c = std::cos(0.4), s = std::sin(0.4);
  gbspe::DenseMatrix basis(2, 2);
  basis(0, 0) = c;
  basis(0, 1) = -s;
  basis(1, 0) = s;
  basis(1, 1) = c;
  std::vector<double> a{0.6, 0.48, 0.64};
  return gbspe::ProblemInstance::from_spectrum({2, 1}, a, {0.7, 0.3}, basis);
}

/// Fresh scratch directory under the system temp dir.
inline std::filesystem::path scratch_dir(const std::string& name) {
  const auto dir = std::filesystem::temp_directory_path() / ("gbspe_test_" + name);
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

}  // namespace testing
