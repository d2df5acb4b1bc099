#pragma once

// Monte-Carlo estimate of the share of problem space (a, B) on which a GBS
// estimator needs fewer guaranteed samples than plain Monte Carlo, with
// efficiency-ratio summaries and multi-cell sweeps.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "gbspe/estimators.hpp"
#include "gbspe/hafnian.hpp"
#include "gbspe/problem.hpp"
#include "gbspe/rng.hpp"

namespace gbspe {

enum class AdvantageMode { gbsp_vs_mc_haf, gbsi_vs_mc_hafsq };

/// self_normalized: sum |D| H / sum |D| (ratio estimator).
/// raw_times_cn: the literal 1/(n1 n2) sum |D| H scaled by an estimate of
/// c_N = 1 / E|D| from an independent stream of eigenvalue draws.
enum class Normalization { self_normalized, raw_times_cn };

std::string to_string(AdvantageMode mode);
std::string to_string(Normalization normalization);
AdvantageMode parse_advantage_mode(const std::string& text);  // "gbsp" | "gbsi"
Normalization parse_normalization(const std::string& text);   // "self" | "raw"

inline ProblemKind problem_kind(AdvantageMode mode) {
  return mode == AdvantageMode::gbsp_vs_mc_haf ? ProblemKind::haf : ProblemKind::hafsq;
}

struct AdvantageConfig {
  ProblemShape shape;
  AdvantageMode mode = AdvantageMode::gbsp_vs_mc_haf;
  std::uint64_t n1 = 30;
  std::uint64_t n2 = 100;
  std::uint64_t seed = 0;
  double budget = kDefaultHafnianBudget;
  Normalization normalization = Normalization::self_normalized;
  std::uint64_t cn_draws = 100000;

  void validate() const;
};

struct TrialRecord {
  std::uint64_t outer = 0;
  std::uint64_t inner = 0;
  double vandermonde = 0.0;
  double mu = 0.0;
  double v_mc = 0.0;
  double v_gbs = 0.0;
  int advantage = 0;  // 1 iff v_mc >= v_gbs
  double ratio = 0.0;  // v_mc / v_gbs
  bool skipped = false;
};

struct AdvantageResult {
  double percentage = 0.0;
  /// Jackknife over outer draws; NaN when fewer than two outer draws count.
  double standard_error = 0.0;
  std::vector<TrialRecord> records;
  /// Running estimate after each outer draw; NaN while undefined.
  std::vector<double> trace;
  std::uint64_t skipped = 0;
  /// c_N estimate (raw_times_cn only, NaN otherwise).
  double cn = 0.0;
};

/// Fills the comparison fields of a record from (mu, V_mc, V_gbs).
void classify_trial(TrialRecord& record);

/// One (B, a) pair: covariance draw, tuning, coefficient draw, comparison.
TrialRecord advantage_trial(RngStream& rng, ProblemShape shape, AdvantageMode mode, HafnianCache& cache,
                            double budget = kDefaultHafnianBudget);

/// Outer draw l: one covariance from `rng` and n2 coefficient draws sharing
/// its hafnians.
std::vector<TrialRecord> advantage_outer_draw(RngStream& rng, std::uint64_t outer, const AdvantageConfig& config,
                                              HafnianCache& cache);

/// Runs the full estimator. Outer draw l uses RngStream(seed).derive(l);
/// the c_N side stream uses derive(UINT64_MAX).
AdvantageResult estimate_percentage(const AdvantageConfig& config);

/// Aggregation shared by estimate_percentage and synthetic tests. Records
/// must be grouped by outer index 0..n1-1. Throws IllPosedError when every
/// trial is skipped.
AdvantageResult aggregate_records(std::vector<TrialRecord> records, std::uint64_t n1, Normalization normalization,
                                  double cn);

/// 1 / mean |Delta(lambda)| over `draws` uniform eigenvalue vectors.
double estimate_cn(RngStream& rng, int modes, std::uint64_t draws);

struct RatioSummary {
  std::size_t count = 0;               // non-skipped records
  std::vector<double> deciles;         // log10 ratio at 0, 10, ..., 100 %
  double median_log10 = 0.0;
  std::vector<double> bin_edges;       // -4, -3, ..., 12
  // Bin 0 is the underflow (< -4), bin i covers [edge_{i-1}, edge_i), the
  // last bin the overflow (>= 12).
  std::vector<std::size_t> counts;
  std::vector<std::size_t> counts_advantage;
  std::vector<std::size_t> counts_no_advantage;
};

RatioSummary efficiency_ratio_summary(const std::vector<TrialRecord>& records);

struct SweepCell {
  int modes = 1;
  int half_degree = 1;
  AdvantageMode mode = AdvantageMode::gbsp_vs_mc_haf;
};

struct SweepRow {
  SweepCell cell;
  std::string status;  // "ok" or "skipped"
  double percentage = 0.0;
  double standard_error = 0.0;
  std::uint64_t trials = 0;
  std::uint64_t skipped = 0;
  double estimated_cost = 0.0;
  double runtime_seconds = 0.0;
};

/// Each cell reuses `base` with its own shape, mode and seed
/// combine_seed(base.seed, {N, K, mode}). Cells over budget are reported
/// with status "skipped".
std::vector<SweepRow> sweep(const std::vector<SweepCell>& cells, const AdvantageConfig& base);

}  // namespace gbspe
