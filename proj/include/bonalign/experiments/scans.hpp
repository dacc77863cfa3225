#pragma once

// Exact scans over sequence length, random alphabets and random feasible
// policies, each comparing best-of-N or a perturbed policy with phi_delta.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <vector>

#include "bonalign/best_of_n.hpp"
#include "bonalign/experiments/common.hpp"
#include "bonalign/experiments/report.hpp"
#include "bonalign/metrics.hpp"
#include "bonalign/random.hpp"
#include "bonalign/tilt.hpp"

namespace bonalign::experiments {

inline const std::vector<std::uint32_t>& default_m_grid() {
  static const std::vector<std::uint32_t> g{5, 10, 20, 40, 80, 160};
  return g;
}

/// round(1000^(i/11)) for i = 0..11.
inline const std::vector<std::uint64_t>& default_n_grid() {
  static const std::vector<std::uint64_t> g{1, 2, 4, 7, 12, 23, 43, 81, 152, 285, 534, 1000};
  return g;
}

/// Slack on D(pi_N^m || p^m) <= log N.
inline constexpr double kKlBoundSlack = 1e-9;

inline ExperimentReport run_equivalence_scan(const ExperimentConfig& config) {
  const Stopwatch clock;
  ExperimentReport report;
  report.config = config;
  const auto p = config_p(config);
  const auto q = config_q(config);
  const double delta = config.delta.value_or(0.11);
  const auto& grid = config.m_grid.empty() ? default_m_grid() : config.m_grid;
  const auto sol = solve_alpha_for_kl(q, p, delta);
  const auto phi_probs = sol.phi.probs();

  struct Row {
    double rate, kl_ref, reward_gap, l1;
  };
  std::vector<Row> rows(grid.size());
  parallel_for(grid.size(), config.workers, [&](std::size_t i) {
    const std::uint32_t m = grid[i];
    const auto law = bon_type_law(p, q, m, BonConfig::log_count(m * delta));
    const auto et = bon_expected_type(law);
    rows[i] = {type_law_kl(law, sol.phi) / m, bon_kl_to_reference(law, p),
               type_law_expected_reward(law, q) / m - sol.expected_reward,
               l1_distance(et, phi_probs)};
  });

  CsvTable csv{"equivalence_scan.csv",
               {"m", "logN", "kl_rate_to_optimal", "kl_to_reference", "kl_bound", "reward_gap",
                "type_l1"},
               {}};
  double bound_excess = -std::numeric_limits<double>::infinity();
  bool decreasing = true;
  double max_rate = 0.0;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const double m = grid[i];
    const auto& r = rows[i];
    csv.add_row({grid[i], m * delta, r.rate, r.kl_ref / m, delta, r.reward_gap, r.l1});
    bound_excess = std::max(bound_excess, r.kl_ref - m * delta);
    if (i > 0 && !(r.rate < rows[i - 1].rate)) decreasing = false;
    max_rate = std::max(max_rate, r.rate);
  }
  report.check_le("kl_to_reference_minus_log_n", bound_excess, kKlBoundSlack);
  if (delta > 0.0 && grid.size() >= 2) {
    report.check_flag("rate_strictly_decreasing", decreasing);
    report.check_le("final_rate_over_first", rows.back().rate / rows.front().rate, 0.5);
  }
  if (delta == 0.0) report.check_le("max_rate_at_zero_budget", max_rate, 0.0);

  report.results["alpha"] = sol.alpha;
  report.results["phi"] = phi_probs;
  report.results["kl_rate_to_optimal"] = [&] {
    std::vector<double> v;
    for (const auto& r : rows) v.push_back(r.rate);
    return v;
  }();
  report.tables.push_back(std::move(csv));
  report.wall_clock_seconds = clock.seconds();
  return report;
}

/// Flat Dirichlet draw with every coordinate at least 1e-12.
inline Categorical draw_simplex_point(std::size_t k, Rng& rng) {
  while (true) {
    auto w = flat_dirichlet(k, rng);
    if (*std::min_element(w.begin(), w.end()) >= 1e-12) return Categorical::from_weights(w);
  }
}

/// Declared ceilings on max D(pi_N || phi_delta) for the reported alphabet
/// sizes; other sizes are reported without a threshold.
inline std::optional<double> random_alphabet_threshold(std::uint64_t k) {
  if (k == 1024) return 0.01;
  if (k == 8) return 0.5;
  return std::nullopt;
}

/// Budgets within the feasibility margin of the supremum are pulled back to
/// max_kl - 2 * margin so phi_delta stays defined.
inline constexpr double kBudgetClampGap = 2.0 * kFeasibilityMargin;

inline ExperimentReport run_random_alphabet(const ExperimentConfig& config) {
  const Stopwatch clock;
  ExperimentReport report;
  report.config = config;
  const std::vector<std::uint64_t> sizes =
      config.K.empty() ? std::vector<std::uint64_t>{1024, 8} : config.K;
  const std::uint64_t seeds = config.seeds.value_or(20);
  const auto& n_grid = config.n_grid.empty() ? default_n_grid() : config.n_grid;
  for (auto k : sizes) {
    bonalign::detail::require(k >= 2, ErrorCode::AlphabetTooSmall, "K must be >= 2");
  }
  for (auto n : n_grid) bonalign::detail::require(n >= 1, ErrorCode::InvalidN, "N must be >= 1");

  struct Outcome {
    double delta = 0.0;
    double kl = 0.0;
    bool clamped = false;
  };
  // [size][seed][n]
  std::vector<std::vector<std::vector<Outcome>>> cells(
      sizes.size(), std::vector<std::vector<Outcome>>(seeds, std::vector<Outcome>(n_grid.size())));
  parallel_for(sizes.size() * seeds, config.workers, [&](std::size_t unit) {
    const std::size_t si = unit / seeds;
    const std::size_t s = unit % seeds;
    Rng rng(derive_seed(derive_seed(SeedSpec{config.seed}, sizes[si]), s));
    const auto p = draw_simplex_point(sizes[si], rng);
    const auto q = draw_simplex_point(sizes[si], rng);
    const double max_kl = max_achievable_kl(q, p);
    for (std::size_t ni = 0; ni < n_grid.size(); ++ni) {
      const auto pi = bon_exact_pmf(p, q.log_probs(), n_grid[ni]);
      auto& c = cells[si][s][ni];
      c.delta = kl_divergence(pi, p);
      if (c.delta >= max_kl - kFeasibilityMargin) {
        c.delta = max_kl - kBudgetClampGap;
        c.clamped = true;
      }
      c.kl = kl_divergence(pi, solve_alpha_for_kl(q, p, c.delta).phi);
    }
  });

  CsvTable csv{"random_alphabet.csv", {"K", "seed_index", "N", "delta", "kl_to_optimal", "clamped"},
               {}};
  auto& summary = report.results["per_alphabet"] = nlohmann::json::array();
  for (std::size_t si = 0; si < sizes.size(); ++si) {
    double worst = 0.0;
    double worst_n1 = 0.0;
    std::uint64_t clamped = 0;
    for (std::uint64_t s = 0; s < seeds; ++s) {
      for (std::size_t ni = 0; ni < n_grid.size(); ++ni) {
        const auto& c = cells[si][s][ni];
        csv.add_row({sizes[si], s, n_grid[ni], c.delta, c.kl, c.clamped ? 1 : 0});
        worst = std::max(worst, c.kl);
        if (n_grid[ni] == 1) worst_n1 = std::max(worst_n1, c.kl);
        clamped += c.clamped ? 1 : 0;
      }
    }
    const std::string tag = "K" + std::to_string(sizes[si]);
    if (const auto limit = random_alphabet_threshold(sizes[si])) {
      report.check_le("max_kl_to_optimal_" + tag, worst, *limit);
    }
    if (std::find(n_grid.begin(), n_grid.end(), 1) != n_grid.end()) {
      report.check_le("max_kl_at_n1_" + tag, worst_n1, 0.0);
    }
    summary.push_back({{"K", sizes[si]},
                       {"max_kl_to_optimal", worst},
                       {"clamped_budgets", clamped},
                       {"threshold", random_alphabet_threshold(sizes[si]).value_or(NAN)}});
  }
  report.results["n_grid"] = n_grid;
  report.tables.push_back(std::move(csv));
  report.wall_clock_seconds = clock.seconds();
  return report;
}

/// One accepted closeness trial.
struct ClosenessTrial {
  std::uint64_t index = 0;
  std::size_t k = 0;
  double delta = 0.0;
  double alpha = 0.0;
  double eps = 0.0;
  double kl_psi_phi = 0.0;
};

inline constexpr double kClosenessSlack = 1e-9;
inline constexpr int kClosenessDirections = 20;
inline constexpr int kClosenessHalvings = 60;

/// Random (p, q, delta) on 3 or 10 symbols by trial parity, and psi obtained
/// by moving from phi_delta toward random simplex points with halving steps
/// until D(psi || p) <= delta. Empty when no direction enters the ball.
inline std::optional<ClosenessTrial> closeness_trial(SeedSpec master, std::uint64_t index) {
  Rng rng(derive_seed(master, index));
  const std::size_t k = index % 2 == 0 ? 3 : 10;
  const auto p = draw_simplex_point(k, rng);
  const auto q = draw_simplex_point(k, rng);
  const double max_kl = max_achievable_kl(q, p);
  const double delta = rng.uniform() * std::min(0.9 * max_kl, 2.0);
  const auto sol = solve_alpha_for_kl(q, p, delta);
  const auto phi = sol.phi.probs();
  const double h_phi = cross_entropy(sol.phi, q);
  for (int d = 0; d < kClosenessDirections; ++d) {
    const auto z = flat_dirichlet(k, rng);
    double step = 1.0;
    for (int h = 0; h < kClosenessHalvings; ++h, step *= 0.5) {
      std::vector<double> w(k);
      for (std::size_t i = 0; i < k; ++i) w[i] = (1.0 - step) * phi[i] + step * z[i];
      if (*std::min_element(w.begin(), w.end()) <= 0.0) continue;
      const auto psi = Categorical::from_weights(w);
      if (kl_divergence(psi, p) > delta) continue;
      return ClosenessTrial{index,
                            k,
                            delta,
                            sol.alpha,
                            cross_entropy(psi, q) - h_phi,
                            kl_divergence(psi, sol.phi)};
    }
  }
  return std::nullopt;
}

inline ExperimentReport run_closeness_bound(const ExperimentConfig& config) {
  const Stopwatch clock;
  ExperimentReport report;
  report.config = config;
  const std::uint64_t target = config.trials.value_or(1000);
  const std::uint64_t attempt_cap = 20 * target + 20;
  const SeedSpec master{config.seed};

  // Batches are evaluated in parallel and consumed in index order, so the
  // accepted set is the first `target` successes regardless of workers.
  std::vector<ClosenessTrial> accepted;
  std::uint64_t skipped = 0;
  std::uint64_t next = 0;
  while (accepted.size() < target && next < attempt_cap) {
    const std::uint64_t batch = std::min<std::uint64_t>(target - accepted.size(), attempt_cap - next);
    std::vector<std::optional<ClosenessTrial>> out(batch);
    parallel_for(batch, config.workers, [&](std::size_t i) { out[i] = closeness_trial(master, next + i); });
    for (auto& t : out) {
      if (!t) {
        ++skipped;
      } else if (accepted.size() < target) {
        accepted.push_back(*t);
      }
    }
    next += batch;
  }

  CsvTable csv{"closeness_bound.csv",
               {"trial", "K", "delta", "alpha", "eps", "kl_psi_phi", "bound"},
               {}};
  std::uint64_t violations = 0;
  double worst_excess = -std::numeric_limits<double>::infinity();
  for (const auto& t : accepted) {
    const double bound = t.alpha * t.eps;
    csv.add_row({t.index, t.k, t.delta, t.alpha, t.eps, t.kl_psi_phi, bound});
    worst_excess = std::max(worst_excess, t.kl_psi_phi - bound);
    if (t.kl_psi_phi > bound + kClosenessSlack) ++violations;
  }
  report.check_flag("accepted_all_trials", accepted.size() == target);
  report.check_le("violations", static_cast<double>(violations), 0.0);

  // The two closed-form cases on the configured (p, q, delta).
  const auto p = config_p(config);
  const auto q = config_q(config);
  const auto sol = solve_alpha_for_kl(q, p, config.delta.value_or(0.11));
  const double h_phi = cross_entropy(sol.phi, q);
  const double eps_p = cross_entropy(p, q) - h_phi;
  report.check_le("psi_equals_phi_excess", kl_divergence(sol.phi, sol.phi), kClosenessSlack);
  report.check_le("psi_equals_p_excess", kl_divergence(p, sol.phi) - sol.alpha * eps_p,
                  kClosenessSlack);

  report.results["accepted"] = accepted.size();
  report.results["skipped"] = skipped;
  report.results["violations"] = violations;
  report.results["max_excess_over_bound"] = accepted.empty() ? NAN : worst_excess;
  report.results["psi_equals_p"] = {{"eps", eps_p},
                                    {"kl_p_phi", kl_divergence(p, sol.phi)},
                                    {"bound", sol.alpha * eps_p}};
  report.tables.push_back(std::move(csv));
  report.wall_clock_seconds = clock.seconds();
  return report;
}

}  // namespace bonalign::experiments
