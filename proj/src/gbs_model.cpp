#include "gbspe/gbs_model.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "gbspe/errors.hpp"

namespace gbspe {

namespace {

double largest_abs(std::span<const double> eigenvalues) {
  double largest = 0.0;
  for (double l : eigenvalues) largest = std::max(largest, std::abs(l));
  return largest;
}

void require_domain(std::span<const double> eigenvalues, double t) {
  if (!(t >= 0.0) || !(t * largest_abs(eigenvalues) < 1.0))
    throw std::domain_error("scaling t must satisfy 0 <= t * max|lambda| < 1");
}

}  // namespace

double mean_photon_number(std::span<const double> eigenvalues, double t) {
  require_domain(eigenvalues, t);
  double m = 0.0;
  for (double l : eigenvalues) {
    const double x = t * t * l * l;
    m += x / (1.0 - x);
  }
  return m;
}

double normalization(std::span<const double> eigenvalues, double t) {
  require_domain(eigenvalues, t);
  double d = 1.0;
  for (double l : eigenvalues) d *= std::sqrt(1.0 - t * t * l * l);
  return d;
}

double solve_scaling(std::span<const double> eigenvalues, double target) {
  if (!(target > 0.0)) throw std::invalid_argument("solve_scaling: target mean photon number must be positive");
  const double largest = largest_abs(eigenvalues);
  if (!(largest > 0.0)) throw std::invalid_argument("solve_scaling: all eigenvalues are zero");
  const double upper = 1.0 / largest;

  constexpr int kGrid = 64;
  double lo = 0.0;
  double hi = upper;
  for (int i = 1; i < kGrid; ++i) {
    const double t = upper * i / kGrid;
    if (mean_photon_number(eigenvalues, t) >= target) {
      hi = t;
      break;
    }
    lo = t;
  }

  const double tolerance = 1e-10 * target;
  double best = lo;
  double best_residual = std::abs(mean_photon_number(eigenvalues, lo) - target);
  for (int iter = 0; iter < 400; ++iter) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    const double m = mean_photon_number(eigenvalues, mid);
    const double residual = std::abs(m - target);
    if (residual < best_residual) {
      best = mid;
      best_residual = residual;
    }
    if (residual <= tolerance) break;
    (m < target ? lo : hi) = mid;
  }
  if (best_residual > tolerance)
    throw InconsistencyError("solve_scaling: bisection stalled before reaching the residual tolerance");
  return best;
}

double degree_mass_closed_form(std::span<const double> eigenvalues, double t, int half_degree) {
  if (half_degree < 0) throw std::invalid_argument("degree_mass_closed_form: K must be nonnegative");
  const double d = normalization(eigenvalues, t);
  const auto K = static_cast<std::size_t>(half_degree);
  // Coefficient of x^K in prod_l sum_k (2k)!/(4^k (k!)^2) (t l_l)^{2k} x^k.
  std::vector<long double> poly(K + 1, 0.0L);
  poly[0] = 1.0L;
  std::vector<long double> series(K + 1);
  for (double l : eigenvalues) {
    const long double x = static_cast<long double>(t) * t * l * l;
    series[0] = 1.0L;
    for (std::size_t k = 1; k <= K; ++k) series[k] = series[k - 1] * x * (2.0L * k - 1.0L) / (2.0L * k);
    for (std::size_t deg = K + 1; deg-- > 0;) {
      long double acc = 0.0L;
      for (std::size_t k = 0; k <= deg; ++k) acc += poly[deg - k] * series[k];
      poly[deg] = acc;
    }
  }
  return static_cast<double>(d * poly[K]);
}

GbsProgram tune_program(const SymmetricMatrix& covariance, const EigenDecomposition& eigen, int half_degree) {
  if (half_degree < 1) throw std::invalid_argument("tune_program: K must be at least 1");
  GbsProgram program;
  program.covariance = covariance;
  program.eigen = eigen;
  program.target_mean_photons = 2.0 * half_degree;
  program.scaling = solve_scaling(eigen.eigenvalues, program.target_mean_photons);
  program.normalization = normalization(eigen.eigenvalues, program.scaling);
  return program;
}

GbsProgram tune_program(const ProblemInstance& instance) {
  return tune_program(instance.covariance(), instance.eigen(), instance.shape().half_degree);
}

DegreeSampler build_degree_sampler(const GbsProgram& program, int half_degree, HafnianCache& cache) {
  const DegreeHafnians hafnians = batch_hafnians_degree(program.covariance, program.scaling, half_degree, cache);
  DegreeSampler sampler;
  sampler.patterns = hafnians.patterns;
  sampler.probabilities.reserve(hafnians.values.size());
  sampler.cumulative.reserve(hafnians.values.size());
  double running = 0.0;
  for (std::size_t i = 0; i < hafnians.values.size(); ++i) {
    const double h = hafnians.values[i];
    const double p = program.normalization * h * h / factorial((*sampler.patterns)[i]);
    sampler.probabilities.push_back(p);
    running += p;
    sampler.cumulative.push_back(running);
  }
  sampler.other_mass = 1.0 - running;
  if (sampler.other_mass < -1e-10)
    throw InconsistencyError("build_degree_sampler: slice probabilities exceed one");
  sampler.other_mass = std::max(sampler.other_mass, 0.0);
  return sampler;
}

SampleTally draw_tally(const DegreeSampler& sampler, RngStream& rng, std::uint64_t n) {
  if (n == 0) throw std::invalid_argument("draw_tally: n must be at least 1");
  SampleTally tally;
  tally.draws = n;
  tally.counts.assign(sampler.probabilities.size(), 0);
  const auto begin = sampler.cumulative.begin();
  const auto end = sampler.cumulative.end();
  for (std::uint64_t i = 0; i < n; ++i) {
    const double u = rng.uniform01();
    const auto it = std::upper_bound(begin, end, u);
    if (it == end)
      ++tally.other_count;
    else
      ++tally.counts[static_cast<std::size_t>(it - begin)];
  }
  return tally;
}

}  // namespace gbspe
