#include "gbspe/estimators.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

#include "gbspe/errors.hpp"
#include "gbspe/parallel.hpp"

namespace gbspe {

namespace {

// Fixed-shape pairwise reduction so sums do not depend on scheduling.
double pairwise_sum(std::span<const double> values) {
  if (values.size() <= 8) {
    double s = 0.0;
    for (double v : values) s += v;
    return s;
  }
  const std::size_t half = values.size() / 2;
  return pairwise_sum(values.first(half)) + pairwise_sum(values.subspan(half));
}

std::vector<double> pattern_factorials(const std::vector<MultiIndex>& patterns) {
  std::vector<double> out;
  out.reserve(patterns.size());
  for (const MultiIndex& p : patterns) out.push_back(factorial(p));
  return out;
}

std::vector<double> slice_hafnians(const SymmetricMatrix& b, const std::vector<MultiIndex>& patterns,
                                   HafnianCache& cache) {
  std::vector<double> out;
  out.reserve(patterns.size());
  for (const MultiIndex& p : patterns) out.push_back(hafnian_multiindex(b, p, cache));
  return out;
}

// t^{-2K} / d_t
double importance_scale(const GbsProgram& program, int half_degree) {
  return std::pow(program.scaling, -2.0 * half_degree) / program.normalization;
}

double gbsp_from_weights(std::span<const double> alpha, const SampleTally& tally) {
  if (tally.draws == 0) throw std::invalid_argument("gbsp_estimate: empty tally");
  if (tally.counts.size() != alpha.size()) throw std::invalid_argument("gbsp_estimate: tally does not match the slice");
  const double n = static_cast<double>(tally.draws);
  double sum = 0.0;
  for (std::size_t j = 0; j < alpha.size(); ++j)
    if (tally.counts[j] != 0) sum += alpha[j] * std::sqrt(static_cast<double>(tally.counts[j]) / n);
  return sum;
}

double gbsi_from_weights(std::span<const double> w, const SampleTally& tally) {
  if (tally.draws == 0) throw std::invalid_argument("gbsi_estimate: empty tally");
  if (tally.counts.size() != w.size()) throw std::invalid_argument("gbsi_estimate: tally does not match the slice");
  long double sum = 0.0L;
  for (std::size_t j = 0; j < w.size(); ++j)
    if (tally.counts[j] != 0) sum += static_cast<long double>(w[j]) * tally.counts[j];
  return static_cast<double>(sum / tally.draws);
}

// Colouring matrix U diag(sqrt(lambda)).
DenseMatrix colouring(const EigenDecomposition& eigen) {
  const std::size_t n = eigen.eigenvalues.size();
  DenseMatrix c(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) c(i, j) = eigen.basis(i, j) * std::sqrt(eigen.eigenvalues[j]);
  return c;
}

class MonomialEvaluator {
 public:
  explicit MonomialEvaluator(const ProblemInstance& instance)
      : patterns_(instance.patterns()),
        coefficients_(instance.coefficients()),
        modes_(static_cast<std::size_t>(instance.shape().modes)),
        degree_(static_cast<std::size_t>(2 * instance.shape().half_degree)),
        powers_(modes_ * (degree_ + 1)) {}

  double operator()(std::span<const double> y) {
    for (std::size_t k = 0; k < modes_; ++k) {
      double* row = &powers_[k * (degree_ + 1)];
      row[0] = 1.0;
      for (std::size_t e = 1; e <= degree_; ++e) row[e] = row[e - 1] * y[k];
    }
    double sum = 0.0;
    for (std::size_t i = 0; i < patterns_.size(); ++i) {
      if (coefficients_[i] == 0.0) continue;
      double term = coefficients_[i];
      const MultiIndex& p = patterns_[i];
      for (std::size_t k = 0; k < modes_; ++k) term *= powers_[k * (degree_ + 1) + static_cast<std::size_t>(p[k])];
      sum += term;
    }
    return sum;
  }

 private:
  const std::vector<MultiIndex>& patterns_;
  std::span<const double> coefficients_;
  std::size_t modes_;
  std::size_t degree_;
  std::vector<double> powers_;
};

void draw_gaussian(const DenseMatrix& c, RngStream& rng, std::vector<double>& z, std::vector<double>& x) {
  const std::size_t n = c.rows();
  for (std::size_t k = 0; k < n; ++k) z[k] = rng.normal();
  for (std::size_t i = 0; i < n; ++i) {
    double s = 0.0;
    for (std::size_t j = 0; j < n; ++j) s += c(i, j) * z[j];
    x[i] = s;
  }
}

}  // namespace

void AccuracySpec::validate() const {
  if (!(epsilon > 0.0 && epsilon < 1.0)) throw ConfigError("epsilon must lie in (0, 1)");
  if (!(delta > 0.0 && delta < 1.0)) throw ConfigError("delta must lie in (0, 1)");
}

double mu_haf(const ProblemInstance& instance, HafnianCache& cache) {
  const auto a = instance.coefficients();
  const auto& patterns = instance.patterns();
  std::vector<double> terms(patterns.size());
  for (std::size_t i = 0; i < patterns.size(); ++i)
    terms[i] = a[i] == 0.0 ? 0.0 : a[i] * hafnian_multiindex(instance.covariance(), patterns[i], cache);
  return pairwise_sum(terms);
}

double mu_hafsq(const ProblemInstance& instance, HafnianCache& cache) {
  const auto a = instance.coefficients();
  const auto& patterns = instance.patterns();
  std::vector<double> terms(patterns.size());
  for (std::size_t i = 0; i < patterns.size(); ++i) {
    if (a[i] == 0.0) continue;
    const double h = hafnian_multiindex(instance.covariance(), patterns[i], cache);
    terms[i] = a[i] * h * h;
  }
  return pairwise_sum(terms);
}

std::vector<double> gbsp_weights(const ProblemInstance& instance, const GbsProgram& program, HafnianCache& cache) {
  const int K = instance.shape().half_degree;
  const double scale = std::pow(program.scaling, -static_cast<double>(K)) / std::sqrt(program.normalization);
  const auto a = instance.coefficients();
  const auto& patterns = instance.patterns();
  std::vector<double> alpha(patterns.size(), 0.0);
  for (std::size_t j = 0; j < patterns.size(); ++j) {
    if (a[j] == 0.0) continue;
    const int sign = hafnian_sign(instance.covariance(), patterns[j], cache);
    alpha[j] = a[j] * scale * sign * std::sqrt(factorial(patterns[j]));
  }
  return alpha;
}

double gbsp_estimate(const ProblemInstance& instance, const GbsProgram& program, const SampleTally& tally,
                     HafnianCache& cache) {
  return gbsp_from_weights(gbsp_weights(instance, program, cache), tally);
}

std::vector<double> gbsi_weights(const ProblemInstance& instance, const GbsProgram& program) {
  const double scale = importance_scale(program, instance.shape().half_degree);
  const auto a = instance.coefficients();
  const auto& patterns = instance.patterns();
  std::vector<double> w(patterns.size());
  for (std::size_t j = 0; j < patterns.size(); ++j) w[j] = factorial(patterns[j]) * a[j] * scale;
  return w;
}

double gbsi_estimate(const ProblemInstance& instance, const GbsProgram& program, const SampleTally& tally) {
  return gbsi_from_weights(gbsi_weights(instance, program), tally);
}

double mc_estimate_haf(const ProblemInstance& instance, RngStream& rng, std::uint64_t n) {
  if (n == 0) throw std::invalid_argument("mc_estimate_haf: n must be at least 1");
  const DenseMatrix c = colouring(instance.eigen());
  const std::size_t modes = c.rows();
  std::vector<double> z(modes), x(modes);
  MonomialEvaluator f(instance);
  long double sum = 0.0L;
  for (std::uint64_t i = 0; i < n; ++i) {
    draw_gaussian(c, rng, z, x);
    sum += f(x);
  }
  return static_cast<double>(sum / n);
}

double mc_estimate_hafsq(const ProblemInstance& instance, RngStream& rng, std::uint64_t n) {
  if (n == 0) throw std::invalid_argument("mc_estimate_hafsq: n must be at least 1");
  const DenseMatrix c = colouring(instance.eigen());
  const std::size_t modes = c.rows();
  std::vector<double> z(modes), p(modes), q(modes), y(modes);
  MonomialEvaluator f(instance);
  long double sum = 0.0L;
  for (std::uint64_t i = 0; i < n; ++i) {
    draw_gaussian(c, rng, z, p);
    draw_gaussian(c, rng, z, q);
    for (std::size_t k = 0; k < modes; ++k) y[k] = p[k] * q[k];
    sum += f(y);
  }
  return static_cast<double>(sum / n);
}

double clamp_variance(double value, double scale) {
  if (std::isnan(value)) throw InconsistencyError("variance evaluated to NaN");
  if (value >= 0.0) return value;
  const double tolerance = 1e-12 * std::max(1.0, std::abs(scale));
  if (value < -tolerance)
    throw InconsistencyError("variance is negative beyond rounding tolerance: " + std::to_string(value));
  return 0.0;
}

// ---- pair table -------------------------------------------------------------

std::uint64_t distinct_pair_hafnians(ProblemShape shape) {
  shape.validate();
  return count_sigma(shape.modes, 2 * shape.half_degree);
}

double estimate_pair_cost(ProblemShape shape) {
  shape.validate();
  const auto patterns = degree_patterns(static_cast<std::size_t>(shape.modes), 4 * shape.half_degree);
  double cost = 0.0;
  for (const MultiIndex& p : *patterns) cost += hafnian_cost(p);
  return cost;
}

void check_pair_budget(ProblemShape shape, double budget) {
  // Counting the patterns is cheap; enumerate them only when the count is
  // small enough for the enumeration itself to be sensible.
  const std::uint64_t distinct = distinct_pair_hafnians(shape);
  double cost = static_cast<double>(distinct);
  if (distinct <= 5'000'000) cost = estimate_pair_cost(shape);
  if (cost > budget) {
    throw BudgetExceeded("V^MC pair table for N=" + std::to_string(shape.modes) + ", K=" +
                             std::to_string(shape.half_degree) + " needs " + std::to_string(distinct) +
                             " distinct hafnians (estimated cost " + std::to_string(cost) + " > budget " +
                             std::to_string(budget) + ")",
                         cost);
  }
}

MomentTable MomentTable::build(const SymmetricMatrix& covariance, ProblemShape shape, HafnianCache& cache,
                               double budget, bool parallel) {
  check_pair_budget(shape, budget);
  const auto modes = static_cast<std::size_t>(shape.modes);
  const int degree = 2 * shape.half_degree;
  const auto& singles = *degree_patterns(modes, degree);
  const auto& doubles = *degree_patterns(modes, 2 * degree);

  std::vector<double> distinct(doubles.size());
  auto fill = [&](std::size_t i) { distinct[i] = hafnian_multiindex(covariance, doubles[i], cache); };
  if (parallel)
    parallel_for(doubles.size(), fill);
  else
    for (std::size_t i = 0; i < doubles.size(); ++i) fill(i);

  MomentTable table;
  table.singles_.resize(singles.size());
  const std::size_t s = singles.size();
  table.pairs_.resize(s * s);
  std::vector<int> sum(modes);
  for (std::size_t i = 0; i < s; ++i) {
    table.singles_[i] = hafnian_multiindex(covariance, singles[i], cache);
    for (std::size_t j = i; j < s; ++j) {
      for (std::size_t k = 0; k < modes; ++k) sum[k] = singles[i][k] + singles[j][k];
      const double v = distinct[lex_rank(sum, 2 * degree)];
      table.pairs_[i * s + j] = v;
      table.pairs_[j * s + i] = v;
    }
  }
  return table;
}

double MomentTable::quadratic_form(std::span<const double> a, bool squared) const {
  const std::size_t s = singles_.size();
  if (a.size() != s) throw std::invalid_argument("quadratic_form: coefficient count mismatch");
  std::vector<double> rows(s);
  for (std::size_t i = 0; i < s; ++i) {
    double row = 0.0;
    const double* p = &pairs_[i * s];
    if (squared)
      for (std::size_t j = 0; j < s; ++j) row += a[j] * p[j] * p[j];
    else
      for (std::size_t j = 0; j < s; ++j) row += a[j] * p[j];
    rows[i] = a[i] * row;
  }
  return pairwise_sum(rows);
}

// ---- variance kernel ----------------------------------------------------------

VarianceKernel::VarianceKernel(ProblemShape shape, const GbsProgram& program, HafnianCache& cache, bool with_pairs,
                               double budget)
    : shape_(shape), scaling_(program.scaling), normalization_(program.normalization) {
  const auto& patterns = *degree_patterns(static_cast<std::size_t>(shape.modes), 2 * shape.half_degree);
  if (with_pairs) {
    table_ = MomentTable::build(program.covariance, shape, cache, budget);
    singles_.assign(table_->singles().begin(), table_->singles().end());
  } else {
    singles_ = slice_hafnians(program.covariance, patterns, cache);
  }
  factorials_ = pattern_factorials(patterns);
}

const MomentTable& VarianceKernel::table() const {
  if (!table_) throw std::logic_error("VarianceKernel: pair table was not built");
  return *table_;
}

double VarianceKernel::mu(std::span<const double> a, ProblemKind kind) const {
  std::vector<double> terms(a.size());
  for (std::size_t i = 0; i < a.size(); ++i)
    terms[i] = kind == ProblemKind::haf ? a[i] * singles_[i] : a[i] * singles_[i] * singles_[i];
  return pairwise_sum(terms);
}

double VarianceKernel::v_gbs(std::span<const double> a, ProblemKind kind) const {
  const double scale = std::pow(scaling_, -2.0 * shape_.half_degree) / normalization_;
  std::vector<double> terms(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    terms[i] = a[i] * a[i] * factorials_[i];
    if (kind == ProblemKind::hafsq) terms[i] *= singles_[i] * singles_[i];
  }
  const double second = scale * pairwise_sum(terms);
  const double m = mu(a, kind);
  const double v = clamp_variance(second - m * m, second);
  return kind == ProblemKind::haf ? 0.25 * v : v;
}

double VarianceKernel::v_mc(std::span<const double> a, ProblemKind kind) const {
  const double second = table().quadratic_form(a, kind == ProblemKind::hafsq);
  const double m = mu(a, kind);
  return clamp_variance(second - m * m, second);
}

double variance_gbsp(const ProblemInstance& instance, const GbsProgram& program, HafnianCache& cache) {
  return VarianceKernel(instance.shape(), program, cache, false).v_gbs(instance.coefficients(), ProblemKind::haf);
}

double variance_gbsi(const ProblemInstance& instance, const GbsProgram& program, HafnianCache& cache) {
  return VarianceKernel(instance.shape(), program, cache, false).v_gbs(instance.coefficients(), ProblemKind::hafsq);
}

double variance_mc_haf(const ProblemInstance& instance, HafnianCache& cache, double budget) {
  const MomentTable table = MomentTable::build(instance.covariance(), instance.shape(), cache, budget);
  const double second = table.quadratic_form(instance.coefficients(), false);
  const double m = mu_haf(instance, cache);
  return clamp_variance(second - m * m, second);
}

double variance_mc_hafsq(const ProblemInstance& instance, HafnianCache& cache, double budget) {
  const MomentTable table = MomentTable::build(instance.covariance(), instance.shape(), cache, budget);
  const double second = table.quadratic_form(instance.coefficients(), true);
  const double m = mu_hafsq(instance, cache);
  return clamp_variance(second - m * m, second);
}

// ---- sample sizes -------------------------------------------------------------

double required_samples(double variance, double mu, const AccuracySpec& spec) {
  if (!(variance >= 0.0)) throw std::invalid_argument("required_samples: variance must be nonnegative");
  if (!(spec.epsilon > 0.0) || !(spec.delta > 0.0))
    throw std::invalid_argument("required_samples: epsilon and delta must be positive");
  if (mu == 0.0 || std::abs(mu) < 1e-12 * std::sqrt(variance))
    throw IllPosedError("ill-posed instance: target value is numerically zero");
  return variance / (spec.delta * spec.epsilon * spec.epsilon * mu * mu);
}

std::uint64_t guaranteed_sample_size(double variance, double mu, const AccuracySpec& spec) {
  const double n = std::ceil(required_samples(variance, mu, spec));
  if (n <= 1.0) return 1;
  if (n >= 18446744073709551615.0) return std::numeric_limits<std::uint64_t>::max();
  return static_cast<std::uint64_t>(n);
}

VarianceReport variance_report(const ProblemInstance& instance, ProblemKind kind, const AccuracySpec& spec,
                               HafnianCache& cache, double budget) {
  const GbsProgram program = tune_program(instance);
  VarianceKernel kernel(instance.shape(), program, cache, true, budget);
  VarianceReport report;
  report.kind = kind;
  report.scaling = program.scaling;
  report.mu = kernel.mu(instance.coefficients(), kind);
  report.v_gbs = kernel.v_gbs(instance.coefficients(), kind);
  report.v_mc = kernel.v_mc(instance.coefficients(), kind);
  report.n_gbs = guaranteed_sample_size(report.v_gbs, report.mu, spec);
  report.n_mc = guaranteed_sample_size(report.v_mc, report.mu, spec);
  report.asymptotic = kind == ProblemKind::haf;
  return report;
}

// ---- optimal scaling ------------------------------------------------------

double gamma_objective(std::span<const double> eigenvalues, double t, int half_degree) {
  double g = -2.0 * half_degree * std::log(t);
  for (double l : eigenvalues) g -= 0.5 * std::log1p(-t * t * l * l);
  return g;
}

double gamma_derivative(std::span<const double> eigenvalues, double t, int half_degree) {
  double d = -2.0 * half_degree / t;
  for (double l : eigenvalues) d += t * l * l / (1.0 - t * t * l * l);
  return d;
}

ScalingCertificate optimal_t_certificate(std::span<const double> eigenvalues, int half_degree,
                                         std::size_t grid_points) {
  if (grid_points == 0) throw std::invalid_argument("optimal_t_certificate: grid must be nonempty");
  double largest = 0.0;
  for (double l : eigenvalues) largest = std::max(largest, std::abs(l));
  if (!(largest > 0.0)) throw std::invalid_argument("optimal_t_certificate: all eigenvalues are zero");

  ScalingCertificate cert;
  cert.t0 = solve_scaling(eigenvalues, 2.0 * half_degree);
  cert.gamma_at_t0 = gamma_objective(eigenvalues, cert.t0, half_degree);
  cert.derivative_at_t0 = gamma_derivative(eigenvalues, cert.t0, half_degree);

  const double upper = 1.0 / largest;
  cert.grid.resize(grid_points);
  cert.gamma.resize(grid_points);
  double nearest_gap = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < grid_points; ++i) {
    const double t = upper * static_cast<double>(i + 1) / static_cast<double>(grid_points + 1);
    cert.grid[i] = t;
    cert.gamma[i] = gamma_objective(eigenvalues, t, half_degree);
    if (cert.gamma[i] < cert.gamma[cert.grid_argmin]) cert.grid_argmin = i;
    const double gap = std::abs(t - cert.t0);
    if (gap < nearest_gap) {
      nearest_gap = gap;
      cert.nearest_to_t0 = i;
    }
  }
  const double slack = 1e-12 * std::max(1.0, std::abs(cert.gamma_at_t0));
  cert.certified = cert.gamma_at_t0 <= cert.gamma[cert.grid_argmin] + slack;
  return cert;
}

// ---- hybrid plan ------------------------------------------------------------

HybridPlan hybrid_plan(std::span<const SliceInput> slices, const AccuracySpec& spec, SplitRule rule) {
  spec.validate();
  if (slices.empty()) throw ConfigError("hybrid_plan: no slices given");
  HybridPlan plan;
  for (const SliceInput& s : slices) plan.mu_total += s.mu;
  if (plan.mu_total == 0.0) throw IllPosedError("hybrid_plan: total target value is zero");

  const double count = static_cast<double>(slices.size());
  const double delta_k = rule == SplitRule::literal ? (count - 1.0 + spec.delta) / count : spec.delta / count;
  for (const SliceInput& s : slices) {
    if (s.v_mc < 0.0 || s.v_gbs < 0.0) throw ConfigError("hybrid_plan: variances must be nonnegative");
    SlicePlanEntry entry;
    entry.degree = s.degree;
    entry.mu = s.mu;
    entry.delta = delta_k;
    if (s.mu == 0.0) {
      entry.ill_posed = true;
      entry.epsilon = std::numeric_limits<double>::infinity();
    } else {
      entry.epsilon = (spec.epsilon / count) * std::abs(plan.mu_total) / std::abs(s.mu);
      const AccuracySpec local{entry.epsilon, entry.delta};
      try {
        entry.n_mc = std::max(1.0, std::ceil(required_samples(s.v_mc, s.mu, local)));
        entry.n_gbs = std::max(1.0, std::ceil(required_samples(s.v_gbs, s.mu, local)));
      } catch (const IllPosedError&) {
        entry.ill_posed = true;
      }
    }
    if (entry.ill_posed) {
      entry.choice = "ill-posed";
      plan.complete = false;
    } else {
      entry.choice = entry.n_gbs < entry.n_mc ? "gbs" : "mc";
      plan.total_mc += entry.n_mc;
      plan.total_gbs += entry.n_gbs;
      plan.total_hybrid += std::min(entry.n_mc, entry.n_gbs);
    }
    plan.slices.push_back(entry);
  }
  return plan;
}

// ---- replicated simulation -----------------------------------------------

namespace {

std::vector<double> replicate(const ProblemInstance& instance, const GbsProgram& program, EstimatorKind estimator,
                              ProblemKind kind, std::uint64_t n, std::size_t replicas, const RngStream& rng,
                              HafnianCache& cache, double& target) {
  if (n == 0) throw ConfigError("sample count n must be at least 1");
  if (replicas == 0) throw ConfigError("replica count must be at least 1");
  std::vector<double> estimates(replicas);
  if (estimator == EstimatorKind::mc) {
    target = kind == ProblemKind::haf ? mu_haf(instance, cache) : mu_hafsq(instance, cache);
    parallel_for(replicas, [&](std::size_t r) {
      RngStream stream = rng.derive(r);
      estimates[r] = kind == ProblemKind::haf ? mc_estimate_haf(instance, stream, n)
                                              : mc_estimate_hafsq(instance, stream, n);
    });
    return estimates;
  }
  const DegreeSampler sampler = build_degree_sampler(program, instance.shape().half_degree, cache);
  std::vector<double> weights;
  if (estimator == EstimatorKind::gbsp) {
    target = mu_haf(instance, cache);
    weights = gbsp_weights(instance, program, cache);
  } else {
    target = mu_hafsq(instance, cache);
    weights = gbsi_weights(instance, program);
  }
  parallel_for(replicas, [&](std::size_t r) {
    RngStream stream = rng.derive(r);
    const SampleTally tally = draw_tally(sampler, stream, n);
    estimates[r] = estimator == EstimatorKind::gbsp ? gbsp_from_weights(weights, tally)
                                                    : gbsi_from_weights(weights, tally);
  });
  return estimates;
}

}  // namespace

ReplicaSummary simulate_replicas(const ProblemInstance& instance, const GbsProgram& program, EstimatorKind estimator,
                                 ProblemKind kind, std::uint64_t n, std::size_t replicas, const RngStream& rng,
                                 HafnianCache& cache) {
  double target = 0.0;
  const std::vector<double> estimates =
      replicate(instance, program, estimator, kind, n, replicas, rng, cache, target);
  std::vector<double> squared(estimates.size());
  for (std::size_t r = 0; r < estimates.size(); ++r) squared[r] = (estimates[r] - target) * (estimates[r] - target);
  ReplicaSummary summary;
  summary.mean = pairwise_sum(estimates) / static_cast<double>(replicas);
  summary.mse = pairwise_sum(squared) / static_cast<double>(replicas);
  return summary;
}

double empirical_mse(const ProblemInstance& instance, const GbsProgram& program, EstimatorKind estimator,
                     ProblemKind kind, std::uint64_t n, std::size_t replicas, const RngStream& rng,
                     HafnianCache& cache) {
  return simulate_replicas(instance, program, estimator, kind, n, replicas, rng, cache).mse;
}

double failure_frequency(const ProblemInstance& instance, const GbsProgram& program, EstimatorKind estimator,
                         ProblemKind kind, std::uint64_t n, std::size_t replicas, double epsilon,
                         const RngStream& rng, HafnianCache& cache) {
  double target = 0.0;
  const std::vector<double> estimates =
      replicate(instance, program, estimator, kind, n, replicas, rng, cache, target);
  std::size_t failures = 0;
  for (double e : estimates)
    if (std::abs(e - target) > epsilon * std::abs(target)) ++failures;
  return static_cast<double>(failures) / static_cast<double>(replicas);
}

}  // namespace gbspe
