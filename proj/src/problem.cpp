#include "gbspe/problem.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "gbspe/errors.hpp"

namespace gbspe {

void ProblemShape::validate() const {
  if (modes < 1) throw ConfigError("N must be at least 1");
  if (half_degree < 1) throw ConfigError("K must be at least 1");
}

std::size_t ProblemShape::coefficient_count() const {
  return static_cast<std::size_t>(count_sigma(modes, half_degree));
}

ProblemInstance::ProblemInstance(ProblemShape shape, std::vector<double> coefficients, SymmetricMatrix covariance,
                                 EigenDecomposition eigen)
    : shape_(shape),
      coefficients_(std::move(coefficients)),
      covariance_(std::move(covariance)),
      eigen_(std::move(eigen)) {
  shape_.validate();
  patterns_ = degree_patterns(static_cast<std::size_t>(shape_.modes), 2 * shape_.half_degree);
  if (coefficients_.size() != patterns_->size())
    throw ConfigError("expected " + std::to_string(patterns_->size()) + " coefficients, got " +
                      std::to_string(coefficients_.size()));
  double norm2 = 0.0;
  for (double a : coefficients_) norm2 += a * a;
  if (std::abs(norm2 - 1.0) > 1e-12) throw ConfigError("coefficients must have unit Euclidean norm");
  const auto n = static_cast<std::size_t>(shape_.modes);
  if (covariance_.dimension() != n || eigen_.eigenvalues.size() != n)
    throw ConfigError("covariance dimension does not match N");
  for (double lambda : eigen_.eigenvalues)
    if (!(lambda > 0.0 && lambda < 1.0)) throw ConfigError("covariance eigenvalues must lie strictly in (0, 1)");
}

ProblemInstance ProblemInstance::from_spectrum(ProblemShape shape, std::vector<double> coefficients,
                                               std::vector<double> eigenvalues, DenseMatrix basis) {
  const std::size_t n = eigenvalues.size();
  if (basis.rows() != n || basis.cols() != n) throw ConfigError("basis must be N x N");
  if (max_abs_difference(basis.transpose() * basis, DenseMatrix::identity(n)) > 1e-10)
    throw ConfigError("basis must be orthogonal");

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return eigenvalues[a] > eigenvalues[b]; });
  EigenDecomposition eigen;
  eigen.eigenvalues.resize(n);
  eigen.basis = DenseMatrix(n, n);
  for (std::size_t k = 0; k < n; ++k) {
    eigen.eigenvalues[k] = eigenvalues[order[k]];
    for (std::size_t i = 0; i < n; ++i) eigen.basis(i, k) = basis(i, order[k]);
  }
  SymmetricMatrix covariance = eigen.reconstruct();
  return ProblemInstance(shape, std::move(coefficients), std::move(covariance), std::move(eigen));
}

double ProblemInstance::coefficient(const MultiIndex& index) const {
  const auto& list = *patterns_;
  const auto it = std::lower_bound(list.begin(), list.end(), index);
  if (it == list.end() || !(*it == index)) return 0.0;
  return coefficients_[static_cast<std::size_t>(it - list.begin())];
}

ProblemInstance ProblemInstance::with_coefficients(std::vector<double> coefficients) const {
  return ProblemInstance(shape_, std::move(coefficients), covariance_, eigen_);
}

SampledCovariance sample_covariance(RngStream& rng, int modes) {
  if (modes < 1) throw ConfigError("N must be at least 1");
  const auto n = static_cast<std::size_t>(modes);
  const DenseMatrix q = sample_haar_orthogonal(rng, n);
  std::vector<double> lambda(n);
  for (double& l : lambda) {
    do {
      l = rng.uniform01();
    } while (!(l > 0.0 && l < 1.0));
  }
  // B = Q^T diag(lambda) Q, so the eigenvectors are the columns of Q^T.
  SampledCovariance out;
  out.vandermonde_weight = vandermonde_abs(lambda);
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return lambda[a] > lambda[b]; });
  out.eigen.eigenvalues.resize(n);
  out.eigen.basis = DenseMatrix(n, n);
  for (std::size_t k = 0; k < n; ++k) {
    out.eigen.eigenvalues[k] = lambda[order[k]];
    for (std::size_t i = 0; i < n; ++i) out.eigen.basis(i, k) = q(order[k], i);
  }
  out.covariance = out.eigen.reconstruct();
  return out;
}

SampledInstance sample_problem_instance(RngStream& rng, ProblemShape shape) {
  shape.validate();
  SampledCovariance cov = sample_covariance(rng, shape.modes);
  std::vector<double> a = sample_unit_sphere(rng, shape.coefficient_count());
  return SampledInstance{ProblemInstance(shape, std::move(a), std::move(cov.covariance), std::move(cov.eigen)),
                         cov.vandermonde_weight};
}

}  // namespace gbspe
