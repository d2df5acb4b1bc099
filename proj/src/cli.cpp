#include "gbspe/cli.hpp"

#include <cmath>
#include <fstream>
#include <functional>
#include <optional>
#include <ostream>

#include <CLI11.hpp>
#include <json.hpp>

#include "gbspe/advantage.hpp"
#include "gbspe/errors.hpp"
#include "gbspe/estimators.hpp"
#include "gbspe/gbs_model.hpp"
#include "gbspe/hafnian.hpp"
#include "gbspe/io.hpp"

namespace gbspe::cli {

namespace {

using nlohmann::json;

ProblemKind parse_kind(const std::string& text) {
  if (text == "haf") return ProblemKind::haf;
  if (text == "hafsq") return ProblemKind::hafsq;
  throw ConfigError("mode: expected 'haf' or 'hafsq', got '" + text + "'");
}

std::string kind_name(ProblemKind kind) { return kind == ProblemKind::haf ? "haf" : "hafsq"; }

EstimatorKind parse_estimator(const std::string& text) {
  if (text == "gbsp") return EstimatorKind::gbsp;
  if (text == "gbsi") return EstimatorKind::gbsi;
  if (text == "mc") return EstimatorKind::mc;
  throw ConfigError("estimator: expected 'gbsp', 'gbsi' or 'mc', got '" + text + "'");
}

SplitRule parse_split(const std::string& text) {
  if (text == "literal") return SplitRule::literal;
  if (text == "union") return SplitRule::union_bound;
  throw ConfigError("split: expected 'literal' or 'union', got '" + text + "'");
}

std::ofstream open_output(const std::string& path) {
  std::ofstream file(path, std::ios::binary);
  if (!file) throw ConfigError("cannot write '" + path + "'");
  return file;
}

// Loads the persistent hafnian cache, runs `body`, then appends new entries.
class CacheSession {
 public:
  CacheSession(const std::string& path, std::ostream& err) : path_(path) {
    if (path_.empty()) return;
    const auto report = cache_.load(path_);
    if (report.truncated_bytes > 0)
      err << "warning: cache '" << path_ << "' had a corrupt tail; truncated " << report.truncated_bytes
          << " bytes after " << report.records << " records\n";
  }
  HafnianCache& cache() { return cache_; }
  void save() {
    if (!path_.empty()) cache_.append_new_entries(path_);
  }

 private:
  std::string path_;
  HafnianCache cache_;
};

ProblemInstance instance_with_k(const std::string& path, std::optional<int> k, std::ostream& err) {
  ProblemInstance instance = load_instance(path, err);
  if (k && *k != instance.shape().half_degree)
    throw ConfigError("K: --K " + std::to_string(*k) + " does not match the instance file (K=" +
                      std::to_string(instance.shape().half_degree) + ")");
  return instance;
}

void print(std::ostream& out, const json& doc) { out << doc.dump(2) << '\n'; }

json config_json(const AdvantageConfig& c) {
  return json{{"N", c.shape.modes},
              {"K", c.shape.half_degree},
              {"mode", to_string(c.mode)},
              {"n1", c.n1},
              {"n2", c.n2},
              {"seed", c.seed},
              {"budget", c.budget},
              {"normalization", to_string(c.normalization)},
              {"cn_draws", c.cn_draws}};
}

json ratio_json(const RatioSummary& s) {
  json deciles = json::array();
  for (double d : s.deciles) deciles.push_back(json_number(d));
  return json{{"count", s.count},
              {"median_log10", json_number(s.median_log10)},
              {"deciles_log10", deciles},
              {"bin_edges_log10", s.bin_edges},
              {"counts", s.counts},
              {"counts_advantage", s.counts_advantage},
              {"counts_no_advantage", s.counts_no_advantage}};
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"GBS-based estimators for Gaussian expectation problems", "gbspe"};
  app.require_subcommand(1);
  std::function<void()> action;

  // hafnian
  std::string matrix_path, index_text, cache_path;
  auto* hafnian_cmd = app.add_subcommand("hafnian", "Hafnian and sign of B_I");
  hafnian_cmd->add_option("--matrix", matrix_path, "JSON matrix file")->required();
  hafnian_cmd->add_option("--index", index_text, "multi-index i1,...,iN")->required();
  hafnian_cmd->add_option("--cache", cache_path, "persistent hafnian cache");
  hafnian_cmd->callback([&] {
    action = [&] {
      const SymmetricMatrix b = load_matrix(matrix_path);
      MultiIndex index;
      try {
        index = MultiIndex::parse(index_text);
      } catch (const std::invalid_argument& e) {
        throw ConfigError(std::string("index: ") + e.what());
      }
      if (index.size() != b.dimension())
        throw ConfigError("index: length " + std::to_string(index.size()) + " does not match the matrix dimension " +
                          std::to_string(b.dimension()));
      if (index.degree() % 2 != 0) throw ConfigError("index: |I| must be even");
      CacheSession session(cache_path, err);
      const double value = hafnian_multiindex(b, index, session.cache());
      session.save();
      print(out, json{{"index", index.to_string()}, {"hafnian", value}, {"sign", sign_of(value)}});
    };
  });

  // solve-t
  int k_value = 1;
  auto* solve_cmd = app.add_subcommand("solve-t", "Scaling t with mean photon number 2K");
  solve_cmd->add_option("--matrix", matrix_path, "JSON matrix file")->required();
  solve_cmd->add_option("--K", k_value, "half-degree K")->required()->check(CLI::PositiveNumber);
  solve_cmd->callback([&] {
    action = [&] {
      const SymmetricMatrix b = load_matrix(matrix_path);
      const EigenDecomposition eigen = eigendecompose(b);
      for (double l : eigen.eigenvalues)
        if (!(l > 0.0 && l < 1.0)) throw ConfigError("matrix: eigenvalues must lie in (0, 1)");
      const GbsProgram program = tune_program(b, eigen, k_value);
      const double m = mean_photon_number(eigen.eigenvalues, program.scaling);
      print(out, json{{"K", k_value},
                      {"t", program.scaling},
                      {"d_t", program.normalization},
                      {"mean_photons", m},
                      {"target", program.target_mean_photons},
                      {"residual", m - program.target_mean_photons},
                      {"degree_mass", degree_mass_closed_form(eigen.eigenvalues, program.scaling, k_value)},
                      {"eigenvalues", eigen.eigenvalues}});
    };
  });

  // variances
  std::string instance_path, kind_text = "haf";
  std::optional<int> k_option;
  double budget = kDefaultHafnianBudget;
  auto* var_cmd = app.add_subcommand("variances", "Target and variance functionals");
  var_cmd->add_option("--instance", instance_path, "JSON instance file")->required();
  var_cmd->add_option("--K", k_option, "half-degree K (must match the file)");
  var_cmd->add_option("--mode", kind_text, "haf or hafsq");
  var_cmd->add_option("--budget", budget, "hafnian work budget for the MC variance");
  var_cmd->add_option("--cache", cache_path, "persistent hafnian cache");
  var_cmd->callback([&] {
    action = [&] {
      const ProblemKind kind = parse_kind(kind_text);
      const ProblemInstance instance = instance_with_k(instance_path, k_option, err);
      CacheSession session(cache_path, err);
      const GbsProgram program = tune_program(instance);
      const VarianceKernel kernel(instance.shape(), program, session.cache(), true, budget);
      const auto a = instance.coefficients();
      session.save();
      print(out, json{{"mode", kind_name(kind)},
                      {"mu", kernel.mu(a, kind)},
                      {"V_gbs", kernel.v_gbs(a, kind)},
                      {"V_mc", kernel.v_mc(a, kind)},
                      {"t", program.scaling},
                      {"d_t", program.normalization},
                      {"gbs_estimator", kind == ProblemKind::haf ? "gbsp" : "gbsi"},
                      {"asymptotic", kind == ProblemKind::haf}});
    };
  });

  // sample-size
  AccuracySpec spec;
  auto* size_cmd = app.add_subcommand("sample-size", "Guaranteed sample sizes for GBS and MC");
  size_cmd->add_option("--instance", instance_path, "JSON instance file")->required();
  size_cmd->add_option("--K", k_option, "half-degree K (must match the file)");
  size_cmd->add_option("--eps", spec.epsilon, "relative accuracy epsilon")->required();
  size_cmd->add_option("--delta", spec.delta, "failure probability delta")->required();
  size_cmd->add_option("--mode", kind_text, "haf or hafsq");
  size_cmd->add_option("--budget", budget, "hafnian work budget for the MC variance");
  size_cmd->add_option("--cache", cache_path, "persistent hafnian cache");
  size_cmd->callback([&] {
    action = [&] {
      spec.validate();
      const ProblemKind kind = parse_kind(kind_text);
      const ProblemInstance instance = instance_with_k(instance_path, k_option, err);
      CacheSession session(cache_path, err);
      const VarianceReport r = variance_report(instance, kind, spec, session.cache(), budget);
      session.save();
      print(out, json{{"mode", kind_name(kind)},
                      {"eps", spec.epsilon},
                      {"delta", spec.delta},
                      {"mu", r.mu},
                      {"V_gbs", r.v_gbs},
                      {"V_mc", r.v_mc},
                      {"n_gbs", r.n_gbs},
                      {"n_mc", r.n_mc},
                      {"t", r.scaling},
                      {"gbs_estimator", kind == ProblemKind::haf ? "gbsp" : "gbsi"},
                      {"asymptotic", r.asymptotic}});
    };
  });

  // simulate
  std::uint64_t n_draws = 1000, replicas = 100, seed = 0;
  std::string estimator_text = "gbsi";
  auto* sim_cmd = app.add_subcommand("simulate", "Replicated estimates and empirical MSE");
  sim_cmd->add_option("--instance", instance_path, "JSON instance file")->required();
  sim_cmd->add_option("--n", n_draws, "samples per estimate")->required()->check(CLI::PositiveNumber);
  sim_cmd->add_option("--replicas", replicas, "independent replicas")->required()->check(CLI::PositiveNumber);
  sim_cmd->add_option("--estimator", estimator_text, "gbsp, gbsi or mc")->required();
  sim_cmd->add_option("--mode", kind_text, "target for mc: haf or hafsq");
  sim_cmd->add_option("--seed", seed, "master seed");
  sim_cmd->add_option("--cache", cache_path, "persistent hafnian cache");
  sim_cmd->callback([&] {
    action = [&] {
      const EstimatorKind estimator = parse_estimator(estimator_text);
      ProblemKind kind = parse_kind(kind_text);
      if (estimator == EstimatorKind::gbsp) kind = ProblemKind::haf;
      if (estimator == EstimatorKind::gbsi) kind = ProblemKind::hafsq;
      const ProblemInstance instance = load_instance(instance_path, err);
      CacheSession session(cache_path, err);
      const GbsProgram program = tune_program(instance);
      const ReplicaSummary summary = simulate_replicas(instance, program, estimator, kind, n_draws, replicas,
                                                       RngStream(seed), session.cache());
      double theory = 0.0;
      double target = 0.0;
      if (estimator == EstimatorKind::mc) {
        theory = kind == ProblemKind::haf ? variance_mc_haf(instance, session.cache(), budget)
                                          : variance_mc_hafsq(instance, session.cache(), budget);
        target = kind == ProblemKind::haf ? mu_haf(instance, session.cache()) : mu_hafsq(instance, session.cache());
      } else if (estimator == EstimatorKind::gbsp) {
        theory = variance_gbsp(instance, program, session.cache());
        target = mu_haf(instance, session.cache());
      } else {
        theory = variance_gbsi(instance, program, session.cache());
        target = mu_hafsq(instance, session.cache());
      }
      session.save();
      const double n = static_cast<double>(n_draws);
      print(out, json{{"estimator", estimator_text},
                      {"mode", kind_name(kind)},
                      {"n", n_draws},
                      {"replicas", replicas},
                      {"seed", seed},
                      {"target", target},
                      {"mean", summary.mean},
                      {"mse", summary.mse},
                      {"n_mse", n * summary.mse},
                      {"V_theory", theory},
                      {"n_mse_over_V", json_number(n * summary.mse / theory)},
                      {"asymptotic", estimator == EstimatorKind::gbsp}});
    };
  });

  // advantage
  AdvantageConfig adv;
  std::string mode_text = "gbsp", normalization_text = "self", records_path, summary_path;
  auto* adv_cmd = app.add_subcommand("advantage", "Share of problem space where GBS beats MC");
  adv_cmd->add_option("--N", adv.shape.modes, "number of modes")->required()->check(CLI::PositiveNumber);
  adv_cmd->add_option("--K", adv.shape.half_degree, "half-degree K")->required()->check(CLI::PositiveNumber);
  adv_cmd->add_option("--mode", mode_text, "gbsp or gbsi");
  adv_cmd->add_option("--n1", adv.n1, "outer matrix draws");
  adv_cmd->add_option("--n2", adv.n2, "inner coefficient draws per matrix");
  adv_cmd->add_option("--seed", adv.seed, "master seed");
  adv_cmd->add_option("--budget", adv.budget, "hafnian work budget per matrix");
  adv_cmd->add_option("--normalization", normalization_text, "self or raw");
  adv_cmd->add_option("--cn-draws", adv.cn_draws, "eigenvalue draws for the c_N estimate (raw mode)");
  adv_cmd->add_option("--records", records_path, "records CSV output path");
  adv_cmd->add_option("--summary", summary_path, "summary JSON output path");
  adv_cmd->callback([&] {
    action = [&] {
      adv.mode = parse_advantage_mode(mode_text);
      adv.normalization = parse_normalization(normalization_text);
      const AdvantageResult result = estimate_percentage(adv);
      json trace = json::array();
      for (double v : result.trace) trace.push_back(json_number(v));
      const json summary{{"config", config_json(adv)},
                         {"percentage", result.percentage},
                         {"stderr", json_number(result.standard_error)},
                         {"trials", result.records.size()},
                         {"skipped", result.skipped},
                         {"cn", json_number(result.cn)},
                         {"trace", trace},
                         {"ratio_summary", ratio_json(efficiency_ratio_summary(result.records))}};
      if (!records_path.empty()) {
        std::ofstream file = open_output(records_path);
        write_records_csv(file, result.records);
      }
      if (!summary_path.empty()) {
        std::ofstream file = open_output(summary_path);
        file << summary.dump(2) << '\n';
      }
      print(out, summary);
    };
  });

  // sweep
  std::string grid_path, table_path, timings_path;
  auto* sweep_cmd = app.add_subcommand("sweep", "Advantage percentages over a grid of (N, K, mode)");
  sweep_cmd->add_option("--grid", grid_path, "JSON grid file")->required();
  sweep_cmd->add_option("--out", table_path, "table CSV output path (stdout if absent)");
  sweep_cmd->add_option("--timings", timings_path, "per-cell runtime CSV output path");
  sweep_cmd->callback([&] {
    action = [&] {
      const SweepGrid grid = sweep_grid_from_json(parse_json(read_text_file(grid_path), grid_path));
      const std::vector<SweepRow> rows = sweep(grid.cells, grid.base);
      if (table_path.empty()) {
        write_sweep_csv(out, rows);
      } else {
        std::ofstream file = open_output(table_path);
        write_sweep_csv(file, rows);
      }
      if (!timings_path.empty()) {
        std::ofstream file = open_output(timings_path);
        write_sweep_timings_csv(file, rows);
      }
    };
  });

  // hybrid-plan
  std::string slices_path, split_text = "literal";
  auto* plan_cmd = app.add_subcommand("hybrid-plan", "Per-degree MC/GBS allocation");
  plan_cmd->add_option("--slices", slices_path, "JSON slices file")->required();
  plan_cmd->add_option("--eps", spec.epsilon, "relative accuracy epsilon")->required();
  plan_cmd->add_option("--delta", spec.delta, "failure probability delta")->required();
  plan_cmd->add_option("--split", split_text, "literal or union");
  plan_cmd->callback([&] {
    action = [&] {
      const std::vector<SliceInput> slices = slices_from_json(parse_json(read_text_file(slices_path), slices_path));
      const HybridPlan plan = hybrid_plan(slices, spec, parse_split(split_text));
      json entries = json::array();
      for (const SlicePlanEntry& e : plan.slices) {
        entries.push_back(json{{"degree", e.degree},
                               {"mu", e.mu},
                               {"eps", json_number(e.epsilon)},
                               {"delta", e.delta},
                               {"n_mc", e.ill_posed ? json(nullptr) : json(e.n_mc)},
                               {"n_gbs", e.ill_posed ? json(nullptr) : json(e.n_gbs)},
                               {"choice", e.choice}});
      }
      print(out, json{{"eps", spec.epsilon},
                      {"delta", spec.delta},
                      {"split", split_text},
                      {"mu_total", plan.mu_total},
                      {"slices", entries},
                      {"total_mc", plan.total_mc},
                      {"total_gbs", plan.total_gbs},
                      {"total_hybrid", plan.total_hybrid},
                      {"complete", plan.complete}});
    };
  });

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::Success& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    app.exit(e, out, err);
    return kExitConfig;
  }

  try {
    if (action) action();
    return kExitOk;
  } catch (const BudgetExceeded& e) {
    err << "error: budget exceeded: " << e.what() << '\n';
    return kExitBudget;
  } catch (const InconsistencyError& e) {
    err << "error: internal inconsistency: " << e.what() << '\n';
    return kExitInternal;
  } catch (const IllPosedError& e) {
    err << "error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitInternal;
  }
}

}  // namespace gbspe::cli
