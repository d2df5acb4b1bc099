// Acceptance runner. Prints one PASS/FAIL line per criterion; an optional
// argument (AC1..AC7) runs a single criterion.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <functional>
#include <limits>
#include <random>
#include <string>
#include <vector>

#include "gbspe/advantage.hpp"
#include "gbspe/estimators.hpp"
#include "gbspe/gbs_model.hpp"
#include "gbspe/hafnian.hpp"
#include "gbspe/multiindex.hpp"
#include "gbspe/problem.hpp"
#include "oracles.hpp"
#include "support.hpp"

using namespace gbspe;

namespace {

struct Verdict {
  bool pass = false;
  std::string detail;
};

int pick(RngStream& rng, int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng); }

std::string fmt(const char* pattern, auto... values) {
  char buffer[512];
  std::snprintf(buffer, sizeof buffer, pattern, values...);
  return buffer;
}

// GBS-I share at (N=6, K=2) over seeds 1..5.
Verdict ac1() {
  std::vector<double> values;
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    AdvantageConfig c;
    c.shape = {6, 2};
    c.mode = AdvantageMode::gbsi_vs_mc_hafsq;
    c.n1 = 30;
    c.n2 = 100;
    c.seed = seed;
    values.push_back(estimate_percentage(c).percentage);
  }
  double mean = 0.0;
  for (double v : values) mean += v / values.size();
  std::string list;
  for (double v : values) list += fmt("%.4f ", v);
  return {std::abs(mean - 0.1870) <= 0.06,
          fmt("mean %.4f (target 0.1870 +- 0.06), seeds 1-5: %s", mean, list.c_str())};
}

// GBS-P share at N=3 is non-decreasing in K=2,3,4 up to two stderr.
Verdict ac2() {
  std::vector<AdvantageResult> results;
  for (int k = 2; k <= 4; ++k) {
    AdvantageConfig c;
    c.shape = {3, k};
    c.mode = AdvantageMode::gbsp_vs_mc_haf;
    c.seed = 1;
    results.push_back(estimate_percentage(c));
  }
  bool ok = true;
  for (std::size_t i = 0; i + 1 < results.size(); ++i) {
    const double tol = 2.0 * std::hypot(results[i].standard_error, results[i + 1].standard_error);
    ok = ok && results[i + 1].percentage >= results[i].percentage - tol;
  }
  std::string detail;
  for (std::size_t i = 0; i < results.size(); ++i)
    detail += fmt("K=%zu %.4f (se %.4f) ", i + 2, results[i].percentage, results[i].standard_error);
  return {ok, detail};
}

// Exact identities on 100 tuned instances with N, K <= 4.
Verdict ac3() {
  RngStream rng(3003);
  double worst_mass = 0.0, worst_bound = -1.0, worst_p = 0.0, worst_i = 0.0, worst_v = 0.0;
  const double bound = 1.0 / std::sqrt(2.0 * std::acos(-1.0)) + 1e-9;
  for (int rep = 0; rep < 100; ++rep) {
    const ProblemShape shape{pick(rng, 1, 4), pick(rng, 1, 4)};
    const ProblemInstance inst = sample_problem_instance(rng, shape).instance;
    const GbsProgram program = tune_program(inst);
    HafnianCache cache;
    const double tk = std::pow(program.scaling, shape.half_degree);

    long double mass = 0.0L;
    for (const MultiIndex& j : inst.patterns()) {
      const double h = tk * hafnian_multiindex(inst.covariance(), j, cache);
      mass += program.normalization * h * h / factorial(j);
    }
    const double closed = degree_mass_closed_form(inst.eigen().eigenvalues, program.scaling, shape.half_degree);
    worst_mass = std::max(worst_mass, testing::relative_error(static_cast<double>(mass), closed));
    worst_bound = std::max(worst_bound, static_cast<double>(mass) - bound);

    const DegreeSampler sampler = build_degree_sampler(program, shape.half_degree, cache);
    const auto alpha = gbsp_weights(inst, program, cache);
    const auto w = gbsi_weights(inst, program);
    long double pa = 0.0L, pw = 0.0L, pw2 = 0.0L;
    for (std::size_t j = 0; j < alpha.size(); ++j) {
      const double p = sampler.probabilities[j];
      pa += alpha[j] * std::sqrt(p);
      pw += p * w[j];
      pw2 += p * w[j] * w[j];
    }
    const double mu = mu_haf(inst, cache);
    worst_p = std::max(worst_p, std::abs(static_cast<double>(pa) - mu) / std::max(1.0, std::abs(mu)));
    worst_i = std::max(worst_i, testing::relative_error(static_cast<double>(pw), mu_hafsq(inst, cache)));
    const double direct = static_cast<double>(pw2 - pw * pw);
    worst_v = std::max(worst_v, testing::relative_error(variance_gbsi(inst, program, cache), direct));
  }
  const bool ok = worst_mass <= 1e-9 && worst_bound <= 0.0 && worst_p <= 1e-10 && worst_i <= 1e-10 && worst_v <= 1e-10;
  return {ok, fmt("mass rel %.2e, mass-bound %.3e, GBS-P %.2e, GBS-I %.2e, variance %.2e", worst_mass, worst_bound,
                  worst_p, worst_i, worst_v)};
}

// n MSE / V at n = 1e5 with 400 replicas on a fixed (N=2, K=1) instance.
Verdict ac4() {
  const ProblemInstance inst = testing::fixed_instance_n2k1();
  const GbsProgram program = tune_program(inst);
  HafnianCache cache;
  const std::uint64_t n = 100'000;
  const double p_mse =
      empirical_mse(inst, program, EstimatorKind::gbsp, ProblemKind::haf, n, 400, RngStream(4001), cache);
  const double i_mse =
      empirical_mse(inst, program, EstimatorKind::gbsi, ProblemKind::hafsq, n, 400, RngStream(4002), cache);
  const double rp = n * p_mse / variance_gbsp(inst, program, cache);
  const double ri = n * i_mse / variance_gbsi(inst, program, cache);
  const auto in = [](double r) { return r >= 0.85 && r <= 1.15; };
  return {in(rp) && in(ri), fmt("GBS-P %.4f, GBS-I %.4f", rp, ri)};
}

// Failure frequency at the guaranteed size, eps = delta = 0.2, on instances
// with N <= 3, K <= 2 whose sizes are at most `cap`.
Verdict ac5() {
  const AccuracySpec spec{0.2, 0.2};
  const std::uint64_t cap = 100'000;
  RngStream rng(5005);
  bool ok = true;
  double worst = 0.0;
  int accepted = 0, drawn = 0;
  std::string sizes;
  while (accepted < 10) {
    ++drawn;
    const ProblemShape shape{pick(rng, 1, 3), pick(rng, 1, 2)};
    const ProblemInstance inst = sample_problem_instance(rng, shape).instance;
    HafnianCache cache;
    const VarianceReport r = variance_report(inst, ProblemKind::hafsq, spec, cache);
    if (std::max(r.n_gbs, r.n_mc) > cap) continue;
    const GbsProgram program = tune_program(inst);
    const RngStream stream = RngStream(5006).derive(accepted);
    const double fg = failure_frequency(inst, program, EstimatorKind::gbsi, ProblemKind::hafsq, r.n_gbs, 2000,
                                        spec.epsilon, stream.derive(0), cache);
    const double fm = failure_frequency(inst, program, EstimatorKind::mc, ProblemKind::hafsq, r.n_mc, 2000,
                                        spec.epsilon, stream.derive(1), cache);
    ok = ok && fg <= spec.delta && fm <= spec.delta;
    worst = std::max({worst, fg, fm});
    sizes += fmt("N=%d K=%d (%llu,%llu) ", shape.modes, shape.half_degree, static_cast<unsigned long long>(r.n_gbs), static_cast<unsigned long long>(r.n_mc));
    ++accepted;
  }
  return {ok, fmt("worst frequency %.4f over %d instances (%d drawn, n <= %llu); n_gbs,n_mc: %s", worst, accepted, drawn,
                  static_cast<unsigned long long>(cap), sizes.c_str())};
}

// Grid minimum of gamma sits at the grid point nearest t0, gamma'(t0) ~ 0.
Verdict ac6() {
  RngStream rng(6006);
  bool ok = true;
  double worst = 0.0;
  int misses = 0, certified = 0;
  std::string missed;
  for (int rep = 0; rep < 50; ++rep) {
    const int n = pick(rng, 1, 4);
    const int k = pick(rng, 1, 4);
    const SampledCovariance c = sample_covariance(rng, n);
    const ScalingCertificate cert = optimal_t_certificate(c.eigen.eigenvalues, k, 200);
    const bool hit = cert.grid_argmin == cert.nearest_to_t0;
    misses += hit ? 0 : 1;
    certified += cert.certified ? 1 : 0;
    if (!hit)
      missed += fmt("(N=%d K=%d argmin %zu nearest %zu) ", n, k, cert.grid_argmin, cert.nearest_to_t0);
    worst = std::max(worst, std::abs(cert.derivative_at_t0));
    ok = ok && hit && std::abs(cert.derivative_at_t0) <= 1e-8;
  }
  return {ok, fmt("argmin misses %d/50 %s, gamma(t0) <= grid minimum on %d/50, max |gamma'(t0)| %.2e", misses,
                  missed.c_str(), certified, worst)};
}

// Fast hafnian paths against the matching-sum reference.
Verdict ac7() {
  RngStream rng(7007);
  double worst = 0.0;
  for (int rep = 0; rep < 200; ++rep) {
    const std::size_t n = 2 * (1 + rep % 6);
    const SymmetricMatrix a = testing::random_symmetric(rng, n);
    const double reference = hafnian_reference(a);
    const double oracle_value = static_cast<double>(oracle::hafnian(testing::to_oracle(a)));
    const double scale = std::max(std::abs(reference), 1e-300);
    worst = std::max({worst, std::abs(hafnian_trace(a) - reference) / scale,
                      std::abs(hafnian_dense(a) - reference) / scale, std::abs(oracle_value - reference) / scale});
  }
  return {worst <= 1e-9, fmt("max relative error %.2e", worst)};
}

}  // namespace

int main(int argc, char** argv) {
  const std::vector<std::pair<std::string, std::function<Verdict()>>> criteria{
      {"AC1", ac1}, {"AC2", ac2}, {"AC3", ac3}, {"AC4", ac4}, {"AC5", ac5}, {"AC6", ac6}, {"AC7", ac7}};
  const std::string only = argc > 1 ? argv[1] : "";
  int failures = 0, ran = 0;
  for (const auto& [name, run] : criteria) {
    if (!only.empty() && only != name) continue;
    ++ran;
    Verdict v;
    try {
      v = run();
    } catch (const std::exception& e) {
      v = {false, std::string("exception: ") + e.what()};
    }
    std::printf("%s %s: %s\n", name.c_str(), v.pass ? "PASS" : "FAIL", v.detail.c_str());
    std::fflush(stdout);
    failures += v.pass ? 0 : 1;
  }
  if (ran == 0) {
    std::fprintf(stderr, "unknown criterion '%s'\n", only.c_str());
    return 2;
  }
  return failures == 0 ? 0 : 1;
}
