#pragma once

#include <memory>
#include <span>
#include <vector>

#include "gbspe/linalg.hpp"
#include "gbspe/multiindex.hpp"
#include "gbspe/rng.hpp"

namespace gbspe {

/// N Gaussian modes, degree-2K monomial slice.
struct ProblemShape {
  int modes = 1;
  int half_degree = 1;

  void validate() const;
  std::size_t coefficient_count() const;  // sigma(N, K)
  friend bool operator==(const ProblemShape&, const ProblemShape&) = default;
};

/// A point (a, B) of the problem space: unit coefficient vector over every
/// |I| = 2K (aligned with degree_patterns(N, 2K)) and a covariance with
/// spectrum strictly inside (0, 1).
class ProblemInstance {
 public:
  ProblemInstance(ProblemShape shape, std::vector<double> coefficients, SymmetricMatrix covariance,
                  EigenDecomposition eigen);

  /// Builds B = U diag(eigenvalues) U^T from its spectral data.
  static ProblemInstance from_spectrum(ProblemShape shape, std::vector<double> coefficients,
                                       std::vector<double> eigenvalues, DenseMatrix basis);

  const ProblemShape& shape() const noexcept { return shape_; }
  const std::vector<MultiIndex>& patterns() const noexcept { return *patterns_; }
  std::shared_ptr<const std::vector<MultiIndex>> shared_patterns() const noexcept { return patterns_; }
  std::span<const double> coefficients() const noexcept { return coefficients_; }
  /// a_I, zero for any index outside the degree-2K slice.
  double coefficient(const MultiIndex& index) const;

  const SymmetricMatrix& covariance() const noexcept { return covariance_; }
  const EigenDecomposition& eigen() const noexcept { return eigen_; }

  ProblemInstance with_coefficients(std::vector<double> coefficients) const;

 private:
  ProblemShape shape_;
  std::shared_ptr<const std::vector<MultiIndex>> patterns_;
  std::vector<double> coefficients_;
  SymmetricMatrix covariance_;
  EigenDecomposition eigen_;
};

/// B = Q^T diag(lambda) Q with Q Haar on SO(N) and lambda_i i.i.d. uniform
/// on (0, 1), together with the Vandermonde weight |Delta(lambda)|.
struct SampledCovariance {
  SymmetricMatrix covariance;
  EigenDecomposition eigen;
  double vandermonde_weight = 0.0;
};

SampledCovariance sample_covariance(RngStream& rng, int modes);

struct SampledInstance {
  ProblemInstance instance;
  double vandermonde_weight;
};

/// Covariance draw followed by a uniform coefficient vector on the sphere.
SampledInstance sample_problem_instance(RngStream& rng, ProblemShape shape);

}  // namespace gbspe
