#pragma once

// Command-line front end: one subcommand per experiment, a shared flat set of
// options, and an optional key = value config file whose keys are the long
// option names. Exit status: 0 all checks passed, 1 a check failed, 2 usage or
// input error.

#include <exception>
#include <functional>
#include <iostream>
#include <optional>
#include <ostream>
#include <string>
#include <thread>
#include <vector>

#include "CLI11.hpp"

#include "bonalign/experiments/config.hpp"
#include "bonalign/experiments/example1.hpp"
#include "bonalign/experiments/ldp_probe.hpp"
#include "bonalign/experiments/report.hpp"
#include "bonalign/experiments/scans.hpp"
#include "bonalign/experiments/ternary.hpp"

namespace bonalign::experiments {

inline constexpr int kExitPass = 0;
inline constexpr int kExitCheckFailed = 1;
inline constexpr int kExitUsage = 2;

inline ExperimentReport run_experiment(const ExperimentConfig& config) {
  switch (config.experiment) {
    case Experiment::example1: return run_example1(config);
    case Experiment::ternary_figure: return run_ternary_figure(config);
    case Experiment::equivalence_scan: return run_equivalence_scan(config);
    case Experiment::random_alphabet: return run_random_alphabet(config);
    case Experiment::closeness_bound: return run_closeness_bound(config);
    case Experiment::ldp_probe: return run_ldp_probe(config);
  }
  throw std::logic_error("unhandled experiment");
}

namespace impl {

template <class T>
void bind_optional(CLI::App& app, const std::string& name, std::optional<T>& target,
                   const std::string& help) {
  app.add_option_function<T>(name, [&target](const T& v) { target = v; }, help);
}

}  // namespace impl

/// Parses argv into a config, runs the experiment, writes its outputs and
/// prints one line per check to `out`.
inline int cli_dispatch(int argc, const char* const* argv, std::ostream& out = std::cout,
                        std::ostream& err = std::cerr) {
  CLI::App app{"Best-of-N versus KL-optimal alignment experiments", "bonalign-cli"};
  app.set_config("--config", "", "key = value file; keys are the long option names");
  app.require_subcommand(0, 1);

  ExperimentConfig cfg;
  cfg.workers = std::max(1u, std::thread::hardware_concurrency());
  std::string experiment_key;
  std::string out_dir = "out";

  app.add_option("--experiment", experiment_key, "experiment to run when no subcommand is given");
  app.add_option("--p", cfg.p, "reference weights, comma separated")->delimiter(',');
  app.add_option("--q", cfg.q, "alignment-distribution weights, comma separated")->delimiter(',');
  app.add_option("--K", cfg.K, "alphabet sizes (random-alphabet)")->delimiter(',');
  impl::bind_optional(app, "--m", cfg.m, "sequence length");
  impl::bind_optional(app, "--N", cfg.N, "best-of-N candidate count");
  impl::bind_optional(app, "--logN", cfg.log_N, "log of the candidate count");
  impl::bind_optional(app, "--delta", cfg.delta, "per-symbol KL budget");
  app.add_option("--deltas", cfg.deltas, "KL budgets")->delimiter(',');
  app.add_option("--m_grid", cfg.m_grid, "sequence lengths (equivalence-scan)")->delimiter(',');
  app.add_option("--n_grid", cfg.n_grid, "candidate counts (random-alphabet)")->delimiter(',');
  app.add_option("--t_grid", cfg.t_grid, "cross-entropy targets (ldp-probe)")->delimiter(',');
  impl::bind_optional(app, "--eps", cfg.eps, "window half-width (ldp-probe)");
  impl::bind_optional(app, "--trials", cfg.trials, "trial count");
  impl::bind_optional(app, "--seeds", cfg.seeds, "seeds per alphabet size (random-alphabet)");
  app.add_option("--seed", cfg.seed, "master seed")->capture_default_str();
  app.add_option("--workers", cfg.workers, "worker threads; results do not depend on it")
      ->check(CLI::PositiveNumber);
  app.add_flag("--bon_probe", cfg.bon_probe, "ldp-probe: also sample best-of-N");
  impl::bind_optional(app, "--bon_m", cfg.bon_m, "ldp-probe: best-of-N sequence length");
  app.add_option("--out,--output_dir", out_dir, "output directory")
      ->envname("ALIGN_OUT_DIR")
      ->capture_default_str();

  std::vector<std::pair<CLI::App*, Experiment>> subs;
  for (auto e : kAllExperiments) {
    auto* sub = app.add_subcommand(std::string(to_string(e)), "run " + std::string(to_string(e)));
    sub->fallthrough();
    subs.emplace_back(sub, e);
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    app.exit(e, out, err);
    return kExitUsage;
  }

  std::optional<Experiment> chosen;
  for (const auto& [sub, e] : subs) {
    if (sub->parsed()) chosen = e;
  }
  if (!chosen && !experiment_key.empty()) {
    chosen = parse_experiment(experiment_key);
    if (!chosen) {
      err << "unknown experiment: " << experiment_key << "\n";
      return kExitUsage;
    }
  }
  if (!chosen) {
    err << "no experiment given\n" << app.help();
    return kExitUsage;
  }
  cfg.experiment = *chosen;
  cfg.output_dir = out_dir;

  ExperimentReport report;
  try {
    report = run_experiment(cfg);
  } catch (const Error& e) {
    err << "error (" << to_string(e.code()) << "): " << e.what() << "\n";
    return kExitUsage;
  }

  std::vector<std::filesystem::path> written;
  try {
    written = write_report(report, cfg.output_dir);
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  }

  out << to_string(cfg.experiment) << " (seed " << cfg.seed << ")\n";
  for (const auto& c : report.checks) {
    out << (c.passed ? "PASS " : "FAIL ") << c.name << " = " << format_number(c.value)
        << " (limit " << format_number(c.threshold) << ")\n";
  }
  for (const auto& path : written) out << "wrote " << path.string() << "\n";
  out << "wall-clock " << report.wall_clock_seconds << " s\n";
  return report.passed() ? kExitPass : kExitCheckFailed;
}

}  // namespace bonalign::experiments
