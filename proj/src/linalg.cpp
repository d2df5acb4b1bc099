#include "gbspe/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <numeric>
#include <stdexcept>
#include <string>

#include "gbspe/errors.hpp"

namespace gbspe {

DenseMatrix DenseMatrix::identity(std::size_t n) {
  DenseMatrix m(n, n);
  for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
  return m;
}

DenseMatrix DenseMatrix::transpose() const {
  DenseMatrix t(cols_, rows_);
  for (std::size_t i = 0; i < rows_; ++i)
    for (std::size_t j = 0; j < cols_; ++j) t(j, i) = (*this)(i, j);
  return t;
}

DenseMatrix operator*(const DenseMatrix& a, const DenseMatrix& b) {
  if (a.cols() != b.rows()) throw std::invalid_argument("matrix product: shape mismatch");
  DenseMatrix c(a.rows(), b.cols());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t k = 0; k < a.cols(); ++k) {
      const double aik = a(i, k);
      for (std::size_t j = 0; j < b.cols(); ++j) c(i, j) += aik * b(k, j);
    }
  return c;
}

double max_abs_difference(const DenseMatrix& a, const DenseMatrix& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols())
    throw std::invalid_argument("max_abs_difference: shape mismatch");
  double worst = 0.0;
  for (std::size_t i = 0; i < a.data().size(); ++i)
    worst = std::max(worst, std::abs(a.data()[i] - b.data()[i]));
  return worst;
}

double determinant(DenseMatrix a) {
  if (a.rows() != a.cols()) throw std::invalid_argument("determinant: matrix not square");
  const std::size_t n = a.rows();
  double det = 1.0;
  for (std::size_t col = 0; col < n; ++col) {
    std::size_t pivot = col;
    for (std::size_t r = col + 1; r < n; ++r)
      if (std::abs(a(r, col)) > std::abs(a(pivot, col))) pivot = r;
    if (a(pivot, col) == 0.0) return 0.0;
    if (pivot != col) {
      for (std::size_t j = 0; j < n; ++j) std::swap(a(pivot, j), a(col, j));
      det = -det;
    }
    det *= a(col, col);
    for (std::size_t r = col + 1; r < n; ++r) {
      const double factor = a(r, col) / a(col, col);
      for (std::size_t j = col; j < n; ++j) a(r, j) -= factor * a(col, j);
    }
  }
  return det;
}

SymmetricMatrix SymmetricMatrix::from_dense(const DenseMatrix& m, double tolerance) {
  if (m.rows() != m.cols()) throw ConfigError("symmetric matrix must be square");
  SymmetricMatrix s(m.rows());
  for (std::size_t i = 0; i < m.rows(); ++i)
    for (std::size_t j = i; j < m.cols(); ++j) {
      if (std::abs(m(i, j) - m(j, i)) > tolerance)
        throw ConfigError("matrix is not symmetric at (" + std::to_string(i) + ", " + std::to_string(j) + ")");
      s.set(i, j, i == j ? m(i, i) : 0.5 * (m(i, j) + m(j, i)));
    }
  return s;
}

SymmetricMatrix SymmetricMatrix::diagonal(std::span<const double> values) {
  SymmetricMatrix s(values.size());
  for (std::size_t i = 0; i < values.size(); ++i) s.set(i, i, values[i]);
  return s;
}

SymmetricMatrix SymmetricMatrix::scaled(double factor) const {
  SymmetricMatrix s = *this;
  for (double& v : s.data_) v *= factor;
  return s;
}

DenseMatrix SymmetricMatrix::to_dense() const {
  DenseMatrix m(n_, n_);
  for (std::size_t i = 0; i < n_; ++i)
    for (std::size_t j = 0; j < n_; ++j) m(i, j) = (*this)(i, j);
  return m;
}

std::uint64_t SymmetricMatrix::fingerprint() const {
  std::uint64_t h = mix64(n_);
  for (double v : data_) {
    std::uint64_t bits;
    std::memcpy(&bits, &v, sizeof bits);
    h = mix64(h ^ bits);
  }
  return h;
}

SymmetricMatrix EigenDecomposition::reconstruct() const {
  const std::size_t n = eigenvalues.size();
  SymmetricMatrix s(n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i; j < n; ++j) {
      double acc = 0.0;
      for (std::size_t k = 0; k < n; ++k) acc += basis(i, k) * eigenvalues[k] * basis(j, k);
      s.set(i, j, acc);
    }
  return s;
}

double EigenDecomposition::largest_abs_eigenvalue() const {
  double largest = 0.0;
  for (double v : eigenvalues) largest = std::max(largest, std::abs(v));
  return largest;
}

EigenDecomposition eigendecompose(const SymmetricMatrix& s) {
  constexpr int kMaxSweeps = 100;
  const std::size_t n = s.dimension();
  DenseMatrix a = s.to_dense();
  DenseMatrix v = DenseMatrix::identity(n);

  double scale = 0.0;
  for (double x : s.data()) scale += x * x;

  bool converged = false;
  for (int sweep = 0; sweep < kMaxSweeps; ++sweep) {
    double off = 0.0;
    for (std::size_t p = 0; p < n; ++p)
      for (std::size_t q = p + 1; q < n; ++q) off += a(p, q) * a(p, q);
    if (off <= 1e-32 * scale || off == 0.0) {
      converged = true;
      break;
    }
    for (std::size_t p = 0; p < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) {
        const double apq = a(p, q);
        if (apq == 0.0) continue;
        const double theta = (a(q, q) - a(p, p)) / (2.0 * apq);
        const double t = (theta >= 0.0 ? 1.0 : -1.0) / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double sn = t * c;
        for (std::size_t k = 0; k < n; ++k) {
          const double akp = a(k, p), akq = a(k, q);
          a(k, p) = c * akp - sn * akq;
          a(k, q) = sn * akp + c * akq;
        }
        for (std::size_t k = 0; k < n; ++k) {
          const double apk = a(p, k), aqk = a(q, k);
          a(p, k) = c * apk - sn * aqk;
          a(q, k) = sn * apk + c * aqk;
        }
        for (std::size_t k = 0; k < n; ++k) {
          const double vkp = v(k, p), vkq = v(k, q);
          v(k, p) = c * vkp - sn * vkq;
          v(k, q) = sn * vkp + c * vkq;
        }
      }
    }
  }
  if (!converged) throw InconsistencyError("eigendecompose: Jacobi iteration did not converge");

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t x, std::size_t y) { return a(x, x) > a(y, y); });

  EigenDecomposition out;
  out.eigenvalues.resize(n);
  out.basis = DenseMatrix(n, n);
  for (std::size_t k = 0; k < n; ++k) {
    out.eigenvalues[k] = a(order[k], order[k]);
    for (std::size_t i = 0; i < n; ++i) out.basis(i, k) = v(i, order[k]);
  }
  return out;
}

DenseMatrix sample_haar_orthogonal(RngStream& rng, std::size_t n) {
  if (n == 0) throw std::invalid_argument("sample_haar_orthogonal: n must be positive");
  DenseMatrix q(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) q(i, j) = rng.normal();

  for (std::size_t j = 0; j < n; ++j) {
    for (int pass = 0; pass < 2; ++pass) {
      for (std::size_t k = 0; k < j; ++k) {
        double dot = 0.0;
        for (std::size_t i = 0; i < n; ++i) dot += q(i, k) * q(i, j);
        for (std::size_t i = 0; i < n; ++i) q(i, j) -= dot * q(i, k);
      }
    }
    double norm = 0.0;
    for (std::size_t i = 0; i < n; ++i) norm += q(i, j) * q(i, j);
    norm = std::sqrt(norm);
    if (norm == 0.0) throw InconsistencyError("sample_haar_orthogonal: rank-deficient Gaussian draw");
    for (std::size_t i = 0; i < n; ++i) q(i, j) /= norm;
  }

  if (determinant(q) < 0.0)
    for (std::size_t i = 0; i < n; ++i) q(i, n - 1) = -q(i, n - 1);
  return q;
}

std::vector<double> sample_unit_sphere(RngStream& rng, std::size_t dim) {
  if (dim == 0) throw std::invalid_argument("sample_unit_sphere: dim must be positive");
  std::vector<double> v(dim);
  for (;;) {
    double norm = 0.0;
    for (double& x : v) {
      x = rng.normal();
      norm += x * x;
    }
    if (norm > 0.0) {
      norm = std::sqrt(norm);
      for (double& x : v) x /= norm;
      return v;
    }
  }
}

double vandermonde_abs(std::span<const double> values) {
  double product = 1.0;
  for (std::size_t i = 0; i < values.size(); ++i)
    for (std::size_t j = i + 1; j < values.size(); ++j) product *= std::abs(values[i] - values[j]);
  return product;
}

}  // namespace gbspe
