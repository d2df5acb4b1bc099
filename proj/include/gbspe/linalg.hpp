#pragma once

// Small dense linear algebra for covariance matrices and the random samplers
// that define the problem-space measure.

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "gbspe/rng.hpp"

namespace gbspe {

/// Row-major dense matrix.
class DenseMatrix {
 public:
  DenseMatrix() = default;
  DenseMatrix(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), data_(rows * cols, 0.0) {}

  static DenseMatrix identity(std::size_t n);

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }

  double& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
  double operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

  std::span<const double> data() const noexcept { return data_; }

  DenseMatrix transpose() const;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

DenseMatrix operator*(const DenseMatrix& a, const DenseMatrix& b);

/// Largest absolute entry of a - b. Shapes must agree.
double max_abs_difference(const DenseMatrix& a, const DenseMatrix& b);

double determinant(DenseMatrix a);

/// Real symmetric matrix. Storage is full row-major; every write goes through
/// `set`, which updates both (i, j) and (j, i), so symmetry is exact.
class SymmetricMatrix {
 public:
  SymmetricMatrix() = default;
  explicit SymmetricMatrix(std::size_t n) : n_(n), data_(n * n, 0.0) {}

  /// Copies a dense matrix that must be symmetric to within `tolerance`
  /// (absolute). The result takes the mean of each mirrored pair.
  static SymmetricMatrix from_dense(const DenseMatrix& m, double tolerance = 1e-12);
  static SymmetricMatrix diagonal(std::span<const double> values);

  std::size_t dimension() const noexcept { return n_; }

  double operator()(std::size_t i, std::size_t j) const { return data_[i * n_ + j]; }
  void set(std::size_t i, std::size_t j, double value) {
    data_[i * n_ + j] = value;
    data_[j * n_ + i] = value;
  }

  std::span<const double> data() const noexcept { return data_; }

  SymmetricMatrix scaled(double factor) const;
  DenseMatrix to_dense() const;

  /// Hash of the exact bit pattern of the entries. Equal matrices share a
  /// fingerprint; used as a cache key.
  std::uint64_t fingerprint() const;

  friend bool operator==(const SymmetricMatrix&, const SymmetricMatrix&) = default;

 private:
  std::size_t n_ = 0;
  std::vector<double> data_;
};

/// Eigen-decomposition S = U diag(eigenvalues) U^T with eigenvalues sorted
/// descending and the columns of `basis` the matching unit eigenvectors.
struct EigenDecomposition {
  std::vector<double> eigenvalues;
  DenseMatrix basis;

  SymmetricMatrix reconstruct() const;
  double largest_abs_eigenvalue() const;
};

/// Cyclic Jacobi eigen-solver. Throws InconsistencyError if the sweep budget
/// is exhausted before the off-diagonal mass vanishes.
EigenDecomposition eigendecompose(const SymmetricMatrix& s);

/// Haar-distributed element of SO(n). A Gaussian matrix is orthogonalised
/// column by column (Gram-Schmidt, applied twice) which yields the unique QR
/// factor with positive R diagonal; if det Q = -1 the last column is negated.
DenseMatrix sample_haar_orthogonal(RngStream& rng, std::size_t n);

/// Uniform point on the unit sphere in R^dim (normalised Gaussian vector).
std::vector<double> sample_unit_sphere(RngStream& rng, std::size_t dim);

/// prod_{i<j} |x_i - x_j|; 1 for fewer than two values.
double vandermonde_abs(std::span<const double> values);

}  // namespace gbspe
