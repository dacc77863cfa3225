#pragma once

// Two-symbol, two-candidate best-of-N over a ternary alphabet: the full joint
// law, its marginals and the witness that it is not a product law.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "bonalign/best_of_n.hpp"
#include "bonalign/bon_oracle.hpp"
#include "bonalign/experiments/common.hpp"
#include "bonalign/experiments/report.hpp"

namespace bonalign::experiments {

/// Exact joint law for the default inputs as integer fractions, [y1][y2].
inline constexpr std::int64_t kExample1Numerators[3][3] = {
    {49, 21, 43}, {21, 81, 9}, {43, 9, 103}};
inline constexpr std::int64_t kExample1Denominators[3][3] = {
    {625, 250, 250}, {250, 10000, 125}, {250, 125, 400}};
inline constexpr std::int64_t kExample1MarginalNumerator = 209;
inline constexpr std::int64_t kExample1MarginalDenominator = 625;

inline constexpr double kExample1Tolerance = 1e-12;
/// Largest K^m for which the joint is tabulated.
inline constexpr std::uint64_t kExample1SequenceCap = 1'000'000;

inline ExperimentReport run_example1(const ExperimentConfig& config) {
  const Stopwatch clock;
  ExperimentReport report;
  report.config = config;
  const auto p = config_p(config);
  const auto q = config_q(config);
  detail::require_same_alphabet(p, q);
  const std::uint32_t m = config.m.value_or(2);
  detail::require(m >= 1, ErrorCode::LengthMismatch, "m must be >= 1");
  const auto bon = config.N       ? BonConfig::count(*config.N)
                   : config.log_N ? BonConfig::log_count(*config.log_N)
                                  : BonConfig::count(2);
  const std::size_t k = p.size();

  std::uint64_t seqs = 1;
  for (std::uint32_t i = 0; i < m; ++i) {
    detail::require(seqs <= kExample1SequenceCap / k, ErrorCode::SizeOverflow,
                    "K^m exceeds the tabulation cap");
    seqs *= k;
  }

  // Route 1: type law, spread evenly over each class.
  const auto law = bon_type_law(p, q, m, bon);
  std::map<std::vector<std::uint32_t>, double> per_seq;
  for (const auto& e : law.entries) {
    const auto c = e.type.counts();
    per_seq[{c.begin(), c.end()}] = e.per_sequence_log_prob;
  }
  std::vector<double> joint(seqs);
  for (std::size_t idx = 0; idx < seqs; ++idx) {
    const auto tau = type_of(sequence_at(idx, m, k), k);
    const auto c = tau.counts();
    joint[idx] = std::exp(per_seq.at({c.begin(), c.end()}));
  }

  // Route 2: level formula over the K^m flat outcomes.
  std::vector<double> flat_lp(seqs);
  std::vector<double> flat_reward(seqs);
  for (std::size_t idx = 0; idx < seqs; ++idx) {
    const auto seq = sequence_at(idx, m, k);
    flat_lp[idx] = log_sequence_prob(p, seq);
    flat_reward[idx] = log_sequence_prob(q, seq);
  }
  const auto flat = bon_exact_pmf(Categorical::from_log_weights(flat_lp), flat_reward, bon);
  double route_gap = 0.0;
  for (std::size_t idx = 0; idx < seqs; ++idx) {
    route_gap = std::max(route_gap, std::abs(flat.prob(idx) - joint[idx]));
  }
  report.check_le("type_law_vs_flat_pmf", route_gap, kExample1Tolerance);

  // Brute-force oracle when the tuple space is small enough.
  std::vector<double> oracle;
  if (const auto n = bon.count(); n && *n <= 64) {
    try {
      oracle = bon_enumeration_oracle(p, q, m, static_cast<std::uint32_t>(*n));
    } catch (const Error& e) {
      if (e.code() != ErrorCode::SizeOverflow) throw;
    }
  }
  if (!oracle.empty()) {
    double gap = 0.0;
    for (std::size_t idx = 0; idx < seqs; ++idx) {
      gap = std::max(gap, std::abs(oracle[idx] - joint[idx]));
    }
    report.check_le("oracle_agreement", gap, kExample1Tolerance);
  }
  report.results["oracle_available"] = !oracle.empty();

  // Marginal of the first coordinate.
  std::vector<double> marginal(k, 0.0);
  for (std::size_t idx = 0; idx < seqs; ++idx) marginal[idx / (seqs / k)] += joint[idx];
  report.results["marginal_first"] = marginal;

  double swap_gap = 0.0;
  double product_gap = 0.0;
  if (m == 2) {
    for (std::size_t a = 0; a < k; ++a) {
      for (std::size_t b = 0; b < k; ++b) {
        swap_gap = std::max(swap_gap, std::abs(joint[a * k + b] - joint[b * k + a]));
        product_gap = std::max(product_gap, std::abs(joint[a * k + b] - marginal[a] * marginal[b]));
      }
    }
    report.check_le("exchangeability_gap", swap_gap, kExample1Tolerance);
    report.results["max_joint_minus_product"] = product_gap;
  }

  const bool default_inputs = p.probs() == Categorical::from_weights(default_p()).probs() &&
                              q.probs() == Categorical::from_weights(default_q()).probs() &&
                              m == 2 && bon.count() == std::uint64_t{2};
  report.results["table_applies"] = default_inputs;
  std::vector<std::optional<double>> table(seqs);
  if (default_inputs) {
    double worst = 0.0;
    for (std::size_t a = 0; a < 3; ++a) {
      for (std::size_t b = 0; b < 3; ++b) {
        table[a * 3 + b] = static_cast<double>(kExample1Numerators[a][b]) /
                           static_cast<double>(kExample1Denominators[a][b]);
        worst = std::max(worst, std::abs(joint[a * 3 + b] - *table[a * 3 + b]));
      }
    }
    const double marginal_exact = static_cast<double>(kExample1MarginalNumerator) /
                                  static_cast<double>(kExample1MarginalDenominator);
    report.check_le("max_table_deviation", worst, kExample1Tolerance);
    report.check_le("marginal_deviation", std::abs(marginal[0] - marginal_exact),
                    kExample1Tolerance);
    // pi(0,0) = 49/625 against (209/625)^2, compared as integer cross products.
    const std::int64_t lhs = kExample1Numerators[0][0] * kExample1MarginalDenominator *
                             kExample1MarginalDenominator;
    const std::int64_t rhs = kExample1MarginalNumerator * kExample1MarginalNumerator *
                             kExample1Denominators[0][0];
    report.check_flag("non_product_witness", lhs != rhs);
    report.results["witness"] = {{"joint_00", "49/625"},
                                 {"marginal_squared", "43681/390625"},
                                 {"joint_00_value", joint[0]},
                                 {"marginal_squared_value", marginal[0] * marginal[0]}};
  }
  report.results["kl_to_reference"] = type_law_kl(law, p);
  report.results["log_N"] = bon.log_n();

  CsvTable csv{"example1_joint.csv", {}, {}};
  for (std::uint32_t i = 0; i < m; ++i) csv.header.push_back("y" + std::to_string(i + 1));
  for (const char* h : {"probability", "oracle_probability", "table_value"}) {
    csv.header.emplace_back(h);
  }
  for (std::size_t idx = 0; idx < seqs; ++idx) {
    auto& row = csv.rows.emplace_back();
    for (Symbol s : sequence_at(idx, m, k)) row.push_back(std::to_string(s));
    row.push_back(Cell(joint[idx]).text);
    row.push_back(Cell(oracle.empty() ? std::optional<double>() : oracle[idx]).text);
    row.push_back(Cell(table[idx]).text);
  }
  report.tables.push_back(std::move(csv));
  report.wall_clock_seconds = clock.seconds();
  return report;
}

}  // namespace bonalign::experiments
