#pragma once

// Rate function of the per-symbol cross entropy under phi_delta^m three ways:
// the tilt formula, the Legendre transform of the cumulants, and window
// frequencies from simulation. Optionally the same window frequencies under
// best-of-N, reported beside the others without a threshold.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <vector>

#include "bonalign/experiments/common.hpp"
#include "bonalign/experiments/report.hpp"
#include "bonalign/experiments/ternary.hpp"
#include "bonalign/ldp.hpp"

namespace bonalign::experiments {

inline constexpr double kLegendreAgreement = 1e-5;
inline constexpr double kRateAtMeanTolerance = 1e-10;
inline constexpr double kBandBase = 0.05;
/// Window probabilities below exp(-m * this) are not expected to be observed.
inline constexpr double kObservableRateCeiling = 3.0;

/// Offsets from the mean of the default t grid.
inline constexpr double kDefaultTOffsets[] = {-0.15, -0.1, 0.0, 0.1, 0.15};

inline ExperimentReport run_ldp_probe(const ExperimentConfig& config) {
  const Stopwatch clock;
  ExperimentReport report;
  report.config = config;
  const auto p = config_p(config);
  const auto q = config_q(config);
  const double delta = config.delta.value_or(0.11);
  const std::uint32_t m = config.m.value_or(400);
  const std::uint64_t trials = config.trials.value_or(100'000);
  const double eps = config.eps.value_or(0.05);
  const SeedSpec master{config.seed};
  bonalign::detail::require(m >= 1, ErrorCode::LengthMismatch, "m must be >= 1");
  bonalign::detail::require(trials >= 1 && trials <= std::uint64_t{10'000'000'000} / m,
                            ErrorCode::BudgetExceeded, "trials * m exceeds 1e10");

  const auto sol = solve_alpha_for_kl(q, p, delta);
  const double mean = cross_entropy(sol.phi, q);
  std::vector<double> grid = config.t_grid;
  if (grid.empty()) {
    for (double off : kDefaultTOffsets) grid.push_back(mean + off);
  }

  const double band = kBandBase + std::log(static_cast<double>(trials)) / m;
  struct Row {
    RatePoint exact;
    double legendre = 0.0;
    DeviationEstimate mc;
    std::optional<DeviationEstimate> bon;
  };
  std::vector<Row> rows(grid.size());
  const std::uint32_t bon_m = config.bon_m.value_or(30);
  const std::uint64_t bon_n = default_figure_n(bon_m, delta);
  const std::uint64_t bon_trials = std::min<std::uint64_t>(trials, 20'000);

  for (std::size_t i = 0; i < grid.size(); ++i) {
    auto& r = rows[i];
    r.exact = rate_function(p, q, delta, grid[i]);
    r.legendre = legendre_oracle(p, q, delta, grid[i]);
    r.mc = empirical_deviation_rate(p, q, delta, grid[i], eps, m, trials, derive_seed(master, i),
                                    config.workers);
    if (config.bon_probe) {
      r.bon = empirical_bon_deviation_rate(p, q, bon_n, grid[i], eps, bon_m, bon_trials,
                                           derive_seed(master, grid.size() + i), config.workers);
    }
  }

  CsvTable csv{"ldp_probe.csv",
               {"t", "beta", "rate_exact", "rate_legendre", "rate_empirical", "hits", "trials"},
               {}};
  if (config.bon_probe) {
    for (const char* h : {"bon_rate_empirical", "bon_hits", "bon_trials"}) csv.header.emplace_back(h);
  }
  double legendre_gap = 0.0;
  double band_excess = 0.0;
  std::uint64_t band_violations = 0;
  std::uint64_t undefined_below_ceiling = 0;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const auto& r = rows[i];
    legendre_gap = std::max(legendre_gap, std::abs(r.exact.rate - r.legendre));
    if (r.exact.rate <= kObservableRateCeiling) {
      if (!r.mc.rate) {
        ++undefined_below_ceiling;
      } else {
        const double dev = std::abs(*r.mc.rate - r.exact.rate);
        band_excess = std::max(band_excess, dev);
        if (dev > band) ++band_violations;
      }
    }
    csv.add_row({r.exact.t, r.exact.beta, r.exact.rate, r.legendre, r.mc.rate, r.mc.hits,
                 r.mc.trials});
    if (r.bon) {
      auto& row = csv.rows.back();
      row.push_back(Cell(r.bon->rate).text);
      row.push_back(Cell(r.bon->hits).text);
      row.push_back(Cell(r.bon->trials).text);
    }
  }
  report.check_le("exact_vs_legendre", legendre_gap, kLegendreAgreement);
  report.check_le("rate_at_mean", rate_function(p, q, delta, mean).rate, kRateAtMeanTolerance);
  report.check_le("mc_band_violations", static_cast<double>(band_violations), 0.0);
  report.check_le("mc_undefined_below_ceiling", static_cast<double>(undefined_below_ceiling), 0.0);

  report.results["mean_cross_entropy"] = mean;
  report.results["band"] = band;
  report.results["max_mc_deviation"] = band_excess;
  report.results["m"] = m;
  report.results["trials"] = trials;
  report.results["eps"] = eps;
  if (config.bon_probe) {
    report.results["bon_probe"] = {{"m", bon_m}, {"N", bon_n}, {"trials", bon_trials}};
  }
  report.tables.push_back(std::move(csv));
  report.wall_clock_seconds = clock.seconds();
  return report;
}

}  // namespace bonalign::experiments
