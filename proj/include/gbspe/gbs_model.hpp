#pragma once

// The GBS output distribution P_{tB}(I) = d_t / I! * Haf((tB)_I)^2 restricted
// to one degree slice, its normalisation and mean photon number, and an exact
// categorical sampler standing in for the device.

#include <cstdint>
#include <memory>
#include <span>
#include <vector>

#include "gbspe/hafnian.hpp"
#include "gbspe/linalg.hpp"
#include "gbspe/multiindex.hpp"
#include "gbspe/problem.hpp"
#include "gbspe/rng.hpp"

namespace gbspe {

/// m_{tB} = sum_n t^2 l_n^2 / (1 - t^2 l_n^2). Throws std::domain_error
/// unless t * max|l| < 1.
double mean_photon_number(std::span<const double> eigenvalues, double t);

/// d_t = prod_n sqrt(1 - t^2 l_n^2).
double normalization(std::span<const double> eigenvalues, double t);

/// Scaling t in (0, 1/max l) with m_{tB} = target, relative residual
/// <= 1e-10. A 64-point grid brackets the root, bisection refines it.
double solve_scaling(std::span<const double> eigenvalues, double target);

/// Closed-form probability of the degree-2K slice:
///   d_t * sum_{k_1+...+k_N=K} prod_l (2k_l)!/(4^{k_l} (k_l!)^2) (t l_l)^{2k_l}
double degree_mass_closed_form(std::span<const double> eigenvalues, double t, int half_degree);

/// A GBS distribution tuned to a degree slice.
struct GbsProgram {
  SymmetricMatrix covariance;
  EigenDecomposition eigen;
  double scaling = 1.0;        // t
  double normalization = 1.0;  // d_t
  double target_mean_photons = 0.0;
};

/// Tunes t so the mean photon number equals 2K.
GbsProgram tune_program(const SymmetricMatrix& covariance, const EigenDecomposition& eigen, int half_degree);
GbsProgram tune_program(const ProblemInstance& instance);

/// P_{tB} over the |I| = 2K patterns plus one lumped OTHER outcome.
struct DegreeSampler {
  std::shared_ptr<const std::vector<MultiIndex>> patterns;
  std::vector<double> probabilities;
  double other_mass = 0.0;
  std::vector<double> cumulative;  // running sums of probabilities

  double slice_mass() const { return cumulative.empty() ? 0.0 : cumulative.back(); }
};

DegreeSampler build_degree_sampler(const GbsProgram& program, int half_degree, HafnianCache& cache);

/// Occurrence counts S^(J)_n aligned with the sampler's patterns.
struct SampleTally {
  std::uint64_t draws = 0;
  std::vector<std::uint64_t> counts;
  std::uint64_t other_count = 0;
};

/// n independent inverse-CDF draws over patterns then OTHER.
SampleTally draw_tally(const DegreeSampler& sampler, RngStream& rng, std::uint64_t n);

}  // namespace gbspe
