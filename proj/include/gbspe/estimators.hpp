#pragma once

// GBS-P, GBS-I and plain Monte-Carlo estimators for the degree-2K slice,
// their exact variance functionals and the guaranteed sample sizes derived
// from them.

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "gbspe/gbs_model.hpp"
#include "gbspe/hafnian.hpp"
#include "gbspe/problem.hpp"
#include "gbspe/rng.hpp"

namespace gbspe {

/// Target accuracy for P(|mu - e| > eps |mu|) < delta.
struct AccuracySpec {
  double epsilon = 0.1;
  double delta = 0.1;
  void validate() const;
};

/// Haf: mu = sum a_I Haf(B_I). HafSq: mu = sum a_I Haf(B_I)^2.
enum class ProblemKind { haf, hafsq };

enum class EstimatorKind { gbsp, gbsi, mc };

inline constexpr double kDefaultHafnianBudget = 1e8;

// ---- targets --------------------------------------------------------------

double mu_haf(const ProblemInstance& instance, HafnianCache& cache);
double mu_hafsq(const ProblemInstance& instance, HafnianCache& cache);

// ---- estimators -------------------------------------------------------------

/// alpha_J = a_J t^{-K} sign(Haf(B_J)) sqrt(J! / d_t).
std::vector<double> gbsp_weights(const ProblemInstance& instance, const GbsProgram& program, HafnianCache& cache);

/// sum_J alpha_J sqrt(S_J / n). OTHER draws contribute nothing.
double gbsp_estimate(const ProblemInstance& instance, const GbsProgram& program, const SampleTally& tally,
                     HafnianCache& cache);

/// w_I = I! / d_t * a_I * t^{-2K}.
std::vector<double> gbsi_weights(const ProblemInstance& instance, const GbsProgram& program);

/// (1/n) sum_i w_{I_i}. OTHER draws have weight zero.
double gbsi_estimate(const ProblemInstance& instance, const GbsProgram& program, const SampleTally& tally);

/// Sample mean of f(X) over n draws X ~ N(0, B).
double mc_estimate_haf(const ProblemInstance& instance, RngStream& rng, std::uint64_t n);
/// Sample mean of sum_I a_I p^I q^I over n draws (p, q) ~ N(0, B (+) B).
double mc_estimate_hafsq(const ProblemInstance& instance, RngStream& rng, std::uint64_t n);

// ---- variance functionals --------------------------------------------------

/// Leading-order GBS-P variance: (t^{-2K}/d_t sum a_J^2 J! - mu^2) / 4.
double variance_gbsp(const ProblemInstance& instance, const GbsProgram& program, HafnianCache& cache);

/// GBS-I variance: t^{-2K}/d_t sum a_J^2 J! Haf(B_J)^2 - mu^2, equal to the
/// categorical variance of the importance weights under the sampler.
double variance_gbsi(const ProblemInstance& instance, const GbsProgram& program, HafnianCache& cache);

/// sum_{J,J'} a_J a_J' Haf(B_{J+J'}) - mu^2 (HafSq: hafnians squared).
/// Throws BudgetExceeded when the pair table is above `budget`.
double variance_mc_haf(const ProblemInstance& instance, HafnianCache& cache, double budget = kDefaultHafnianBudget);
double variance_mc_hafsq(const ProblemInstance& instance, HafnianCache& cache, double budget = kDefaultHafnianBudget);

/// Work estimate for the V^MC pair table of shape (N, K): sum of hafnian
/// costs over every distinct J + J' (all |I| = 4K).
double estimate_pair_cost(ProblemShape shape);
std::uint64_t distinct_pair_hafnians(ProblemShape shape);
void check_pair_budget(ProblemShape shape, double budget);

/// Haf(B_J) for |J| = 2K and Haf(B_{J+J'}) for every pair, built once per
/// covariance. Pair values are stored as a full sigma x sigma table.
class MomentTable {
 public:
  static MomentTable build(const SymmetricMatrix& covariance, ProblemShape shape, HafnianCache& cache,
                           double budget = kDefaultHafnianBudget, bool parallel = false);

  std::size_t size() const noexcept { return singles_.size(); }
  std::span<const double> singles() const noexcept { return singles_; }
  double pair(std::size_t i, std::size_t j) const { return pairs_[i * singles_.size() + j]; }

  /// sum_{i,j} a_i a_j pair(i,j), or with pair(i,j)^2 when `squared`.
  double quadratic_form(std::span<const double> a, bool squared) const;

 private:
  std::vector<double> singles_;
  std::vector<double> pairs_;
};

/// Per-covariance quantities shared by every coefficient vector: hafnians,
/// factorials and the tuned program. Used by the advantage sweep to evaluate
/// many coefficient draws against one matrix.
class VarianceKernel {
 public:
  VarianceKernel(ProblemShape shape, const GbsProgram& program, HafnianCache& cache, bool with_pairs,
                 double budget = kDefaultHafnianBudget);

  double mu(std::span<const double> a, ProblemKind kind) const;
  double v_gbs(std::span<const double> a, ProblemKind kind) const;
  double v_mc(std::span<const double> a, ProblemKind kind) const;

  const MomentTable& table() const;
  std::span<const double> factorials() const noexcept { return factorials_; }
  double scaling() const noexcept { return scaling_; }
  double normalization() const noexcept { return normalization_; }

 private:
  ProblemShape shape_;
  double scaling_;
  double normalization_;
  std::vector<double> singles_;
  std::vector<double> factorials_;
  std::optional<MomentTable> table_;
};

/// Clamps tiny negative variances produced by cancellation. `scale` is the
/// magnitude of the positive term; anything below -1e-12 * max(1, scale)
/// raises InconsistencyError.
double clamp_variance(double value, double scale);

// ---- sample sizes -----------------------------------------------------------

/// V / (delta eps^2 mu^2) before rounding. Throws IllPosedError when
/// |mu| < 1e-12 sqrt(V).
double required_samples(double variance, double mu, const AccuracySpec& spec);

/// ceil(required_samples), at least 1, saturating at UINT64_MAX.
std::uint64_t guaranteed_sample_size(double variance, double mu, const AccuracySpec& spec);

struct VarianceReport {
  ProblemKind kind = ProblemKind::haf;
  double mu = 0.0;
  double v_gbs = 0.0;
  double v_mc = 0.0;
  std::uint64_t n_gbs = 0;
  std::uint64_t n_mc = 0;
  double scaling = 0.0;
  /// GBS-P's size comes from the leading-order MSE and is asymptotic.
  bool asymptotic = false;
};

VarianceReport variance_report(const ProblemInstance& instance, ProblemKind kind, const AccuracySpec& spec,
                               HafnianCache& cache, double budget = kDefaultHafnianBudget);

// ---- optimal scaling ------------------------------------------------------

/// log(t^{-2K} / d_t) and its derivative in t.
double gamma_objective(std::span<const double> eigenvalues, double t, int half_degree);
double gamma_derivative(std::span<const double> eigenvalues, double t, int half_degree);

struct ScalingCertificate {
  double t0 = 0.0;
  double gamma_at_t0 = 0.0;
  double derivative_at_t0 = 0.0;
  std::vector<double> grid;   // interior points of (0, 1/lambda_1)
  std::vector<double> gamma;  // gamma(grid[i])
  std::size_t grid_argmin = 0;
  std::size_t nearest_to_t0 = 0;
  /// gamma(t0) <= gamma(t) at every grid point.
  bool certified = false;
};

ScalingCertificate optimal_t_certificate(std::span<const double> eigenvalues, int half_degree,
                                         std::size_t grid_points = 200);

// ---- hybrid planning across degree slices ---------------------------------

struct SliceInput {
  int degree = 0;
  double mu = 0.0;
  double v_mc = 0.0;
  double v_gbs = 0.0;
};

/// literal: delta_k = 1 - (1 - delta)/K.
/// union_bound: delta_k = delta / K (failure probabilities add up to delta).
enum class SplitRule { literal, union_bound };

struct SlicePlanEntry {
  int degree = 0;
  double mu = 0.0;
  double epsilon = 0.0;
  double delta = 0.0;
  bool ill_posed = false;
  double n_mc = 0.0;
  double n_gbs = 0.0;
  std::string choice;  // "mc", "gbs" or "ill-posed"
};

struct HybridPlan {
  double mu_total = 0.0;
  std::vector<SlicePlanEntry> slices;
  double total_mc = 0.0;
  double total_gbs = 0.0;
  double total_hybrid = 0.0;
  bool complete = true;  // false when a slice is ill-posed
};

HybridPlan hybrid_plan(std::span<const SliceInput> slices, const AccuracySpec& spec,
                       SplitRule rule = SplitRule::literal);

// ---- replicated simulation -----------------------------------------------

struct ReplicaSummary {
  double mean = 0.0;
  double mse = 0.0;
};

/// Runs `replicas` independent estimates of size n (replica r uses
/// rng.derive(r)) and reports their mean and mean squared error about the
/// exact target. `kind` selects the target for the MC estimator.
ReplicaSummary simulate_replicas(const ProblemInstance& instance, const GbsProgram& program, EstimatorKind estimator,
                                 ProblemKind kind, std::uint64_t n, std::size_t replicas, const RngStream& rng,
                                 HafnianCache& cache);

double empirical_mse(const ProblemInstance& instance, const GbsProgram& program, EstimatorKind estimator,
                     ProblemKind kind, std::uint64_t n, std::size_t replicas, const RngStream& rng,
                     HafnianCache& cache);

/// Fraction of replicas with |estimate - mu| > eps |mu|.
double failure_frequency(const ProblemInstance& instance, const GbsProgram& program, EstimatorKind estimator,
                         ProblemKind kind, std::uint64_t n, std::size_t replicas, double epsilon,
                         const RngStream& rng, HafnianCache& cache);

}  // namespace gbspe
