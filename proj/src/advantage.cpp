#include "gbspe/advantage.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "gbspe/errors.hpp"
#include "gbspe/gbs_model.hpp"
#include "gbspe/linalg.hpp"
#include "gbspe/parallel.hpp"

namespace gbspe {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

struct OuterTotals {
  double weight = 0.0;
  double hits = 0.0;   // sum of H over counted trials
  double trials = 0.0; // counted (non-skipped) trials
};

// Point estimate from per-outer totals, leaving out index `skip` if set.
double combine(const std::vector<OuterTotals>& outer, Normalization normalization, double cn,
               std::size_t skip = std::numeric_limits<std::size_t>::max()) {
  if (normalization == Normalization::self_normalized) {
    double num = 0.0;
    double den = 0.0;
    for (std::size_t l = 0; l < outer.size(); ++l) {
      if (l == skip) continue;
      num += outer[l].weight * outer[l].hits;
      den += outer[l].weight * outer[l].trials;
    }
    return den > 0.0 ? num / den : kNaN;
  }
  double sum = 0.0;
  std::size_t used = 0;
  for (std::size_t l = 0; l < outer.size(); ++l) {
    if (l == skip || outer[l].trials == 0.0) continue;
    sum += outer[l].weight * outer[l].hits / outer[l].trials;
    ++used;
  }
  if (used == 0) return kNaN;
  return std::clamp(cn * sum / static_cast<double>(used), 0.0, 1.0);
}

}  // namespace

std::string to_string(AdvantageMode mode) {
  return mode == AdvantageMode::gbsp_vs_mc_haf ? "gbsp" : "gbsi";
}

std::string to_string(Normalization normalization) {
  return normalization == Normalization::self_normalized ? "self" : "raw";
}

AdvantageMode parse_advantage_mode(const std::string& text) {
  if (text == "gbsp") return AdvantageMode::gbsp_vs_mc_haf;
  if (text == "gbsi") return AdvantageMode::gbsi_vs_mc_hafsq;
  throw ConfigError("mode: expected 'gbsp' or 'gbsi', got '" + text + "'");
}

Normalization parse_normalization(const std::string& text) {
  if (text == "self") return Normalization::self_normalized;
  if (text == "raw") return Normalization::raw_times_cn;
  throw ConfigError("normalization: expected 'self' or 'raw', got '" + text + "'");
}

void AdvantageConfig::validate() const {
  try {
    shape.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
  if (n1 < 1) throw ConfigError("n1 must be at least 1");
  if (n2 < 1) throw ConfigError("n2 must be at least 1");
  if (!(budget > 0.0)) throw ConfigError("budget must be positive");
  if (normalization == Normalization::raw_times_cn && cn_draws < 1) throw ConfigError("cn_draws must be at least 1");
}

void classify_trial(TrialRecord& record) {
  const double scale = std::sqrt(std::max(record.v_mc, record.v_gbs));
  record.skipped = record.mu == 0.0 || std::abs(record.mu) < 1e-12 * scale;
  record.advantage = record.v_mc >= record.v_gbs ? 1 : 0;
  record.ratio = record.v_gbs > 0.0 ? record.v_mc / record.v_gbs
                                    : (record.v_mc > 0.0 ? std::numeric_limits<double>::infinity() : 1.0);
}

std::vector<TrialRecord> advantage_outer_draw(RngStream& rng, std::uint64_t outer, const AdvantageConfig& config,
                                              HafnianCache& cache) {
  const SampledCovariance sampled = sample_covariance(rng, config.shape.modes);
  const GbsProgram program = tune_program(sampled.covariance, sampled.eigen, config.shape.half_degree);
  const VarianceKernel kernel(config.shape, program, cache, true, config.budget);
  const ProblemKind kind = problem_kind(config.mode);
  const std::size_t sigma = config.shape.coefficient_count();

  std::vector<TrialRecord> records;
  records.reserve(config.n2);
  for (std::uint64_t m = 0; m < config.n2; ++m) {
    const std::vector<double> a = sample_unit_sphere(rng, sigma);
    TrialRecord r;
    r.outer = outer;
    r.inner = m;
    r.vandermonde = sampled.vandermonde_weight;
    r.mu = kernel.mu(a, kind);
    r.v_mc = kernel.v_mc(a, kind);
    r.v_gbs = kernel.v_gbs(a, kind);
    classify_trial(r);
    records.push_back(r);
  }
  return records;
}

TrialRecord advantage_trial(RngStream& rng, ProblemShape shape, AdvantageMode mode, HafnianCache& cache,
                            double budget) {
  AdvantageConfig config;
  config.shape = shape;
  config.mode = mode;
  config.n1 = 1;
  config.n2 = 1;
  config.budget = budget;
  return advantage_outer_draw(rng, 0, config, cache).front();
}

double estimate_cn(RngStream& rng, int modes, std::uint64_t draws) {
  if (draws == 0) throw std::invalid_argument("estimate_cn: draws must be positive");
  std::vector<double> lambda(static_cast<std::size_t>(modes));
  long double sum = 0.0L;
  for (std::uint64_t i = 0; i < draws; ++i) {
    for (double& l : lambda) l = rng.uniform01();
    sum += vandermonde_abs(lambda);
  }
  return static_cast<double>(static_cast<long double>(draws) / sum);
}

AdvantageResult aggregate_records(std::vector<TrialRecord> records, std::uint64_t n1, Normalization normalization,
                                  double cn) {
  std::vector<OuterTotals> outer(n1);
  AdvantageResult result;
  for (const TrialRecord& r : records) {
    if (r.outer >= n1) throw std::invalid_argument("aggregate_records: outer index out of range");
    OuterTotals& o = outer[r.outer];
    o.weight = r.vandermonde;
    if (r.skipped) {
      ++result.skipped;
      continue;
    }
    o.hits += r.advantage;
    o.trials += 1.0;
  }
  if (result.skipped == records.size()) throw IllPosedError("every trial was skipped as ill-posed");

  result.cn = normalization == Normalization::raw_times_cn ? cn : kNaN;
  result.percentage = combine(outer, normalization, cn);
  if (std::isnan(result.percentage)) throw IllPosedError("every counted trial carries zero Vandermonde weight");

  result.trace.resize(n1);
  std::vector<OuterTotals> prefix;
  prefix.reserve(n1);
  for (std::uint64_t l = 0; l < n1; ++l) {
    prefix.push_back(outer[l]);
    result.trace[l] = combine(prefix, normalization, cn);
  }
  result.trace.back() = result.percentage;

  std::size_t informative = 0;
  for (const OuterTotals& o : outer) informative += o.trials > 0.0 ? 1 : 0;
  if (n1 < 2 || informative < 2) {
    result.standard_error = kNaN;
  } else {
    std::vector<double> leave_out;
    for (std::size_t l = 0; l < n1; ++l) {
      const double v = combine(outer, normalization, cn, l);
      if (!std::isnan(v)) leave_out.push_back(v);
    }
    const double count = static_cast<double>(leave_out.size());
    double mean = 0.0;
    for (double v : leave_out) mean += v;
    mean /= count;
    double ss = 0.0;
    for (double v : leave_out) ss += (v - mean) * (v - mean);
    result.standard_error = std::sqrt((count - 1.0) / count * ss);
  }
  result.records = std::move(records);
  return result;
}

AdvantageResult estimate_percentage(const AdvantageConfig& config) {
  config.validate();
  check_pair_budget(config.shape, config.budget);
  const RngStream root(config.seed);

  std::vector<std::vector<TrialRecord>> per_outer(config.n1);
  parallel_for(config.n1, [&](std::size_t l) {
    RngStream stream = root.derive(l);
    HafnianCache cache;
    per_outer[l] = advantage_outer_draw(stream, l, config, cache);
  });

  std::vector<TrialRecord> records;
  records.reserve(config.n1 * config.n2);
  for (auto& block : per_outer) records.insert(records.end(), block.begin(), block.end());

  double cn = kNaN;
  if (config.normalization == Normalization::raw_times_cn) {
    RngStream side = root.derive(std::numeric_limits<std::uint64_t>::max());
    cn = estimate_cn(side, config.shape.modes, config.cn_draws);
  }
  return aggregate_records(std::move(records), config.n1, config.normalization, cn);
}

RatioSummary efficiency_ratio_summary(const std::vector<TrialRecord>& records) {
  RatioSummary s;
  for (int e = -4; e <= 12; ++e) s.bin_edges.push_back(e);
  const std::size_t bins = s.bin_edges.size() + 1;
  s.counts.assign(bins, 0);
  s.counts_advantage.assign(bins, 0);
  s.counts_no_advantage.assign(bins, 0);

  std::vector<double> logs;
  for (const TrialRecord& r : records) {
    if (r.skipped) continue;
    const double x = std::log10(r.ratio);
    logs.push_back(x);
    std::size_t bin = 0;
    if (x >= s.bin_edges.back())
      bin = bins - 1;
    else if (x >= s.bin_edges.front())
      bin = static_cast<std::size_t>(std::floor(x) - s.bin_edges.front()) + 1;
    ++s.counts[bin];
    ++(r.advantage ? s.counts_advantage : s.counts_no_advantage)[bin];
  }
  s.count = logs.size();
  if (logs.empty()) {
    s.median_log10 = kNaN;
    return s;
  }
  std::sort(logs.begin(), logs.end());
  auto quantile = [&](double q) {
    const double pos = q * static_cast<double>(logs.size() - 1);
    const auto lo = static_cast<std::size_t>(std::floor(pos));
    const std::size_t hi = std::min(lo + 1, logs.size() - 1);
    const double frac = pos - static_cast<double>(lo);
    if (frac == 0.0 || logs[lo] == logs[hi]) return logs[lo];
    return logs[lo] + frac * (logs[hi] - logs[lo]);
  };
  for (int k = 0; k <= 10; ++k) s.deciles.push_back(quantile(k / 10.0));
  s.median_log10 = quantile(0.5);
  return s;
}

std::vector<SweepRow> sweep(const std::vector<SweepCell>& cells, const AdvantageConfig& base) {
  std::vector<SweepRow> rows;
  rows.reserve(cells.size());
  for (const SweepCell& cell : cells) {
    AdvantageConfig config = base;
    config.shape = ProblemShape{cell.modes, cell.half_degree};
    config.mode = cell.mode;
    config.seed = combine_seed(base.seed, {static_cast<std::uint64_t>(cell.modes),
                                           static_cast<std::uint64_t>(cell.half_degree),
                                           static_cast<std::uint64_t>(cell.mode)});
    config.validate();
    SweepRow row;
    row.cell = cell;
    try {
      check_pair_budget(config.shape, config.budget);
    } catch (const BudgetExceeded& e) {
      row.status = "skipped";
      row.percentage = kNaN;
      row.standard_error = kNaN;
      row.estimated_cost = e.estimated_cost();
      rows.push_back(row);
      continue;
    }
    row.estimated_cost = estimate_pair_cost(config.shape);
    const auto start = std::chrono::steady_clock::now();
    const AdvantageResult result = estimate_percentage(config);
    row.runtime_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    row.status = "ok";
    row.percentage = result.percentage;
    row.standard_error = result.standard_error;
    row.trials = result.records.size();
    row.skipped = result.skipped;
    rows.push_back(row);
  }
  return rows;
}

}  // namespace gbspe
