#pragma once

// Large-deviation quantities for the per-symbol cross entropy
// -1/m log q^m(Y) when Y ~ phi_delta^m:
//
//   J(t) = D(T(q, p, beta(t)) || phi_delta),  H(T(q, p, beta(t)) || q) = t,
//
// together with the scaled reward cumulants -H_{1+rho}(phi_delta || q), a
// Monte Carlo estimator for window probabilities, and a Legendre-transform
// oracle that recovers J from the cumulant generating function alone.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <optional>
#include <thread>
#include <utility>
#include <vector>

#include "bonalign/best_of_n.hpp"
#include "bonalign/distribution.hpp"
#include "bonalign/error.hpp"
#include "bonalign/metrics.hpp"
#include "bonalign/numeric.hpp"
#include "bonalign/random.hpp"
#include "bonalign/tilt.hpp"

namespace bonalign {

struct RatePoint {
  double t = 0.0;
  double beta = 0.0;
  double rate = 0.0;
};

struct CumulantPoint {
  double rho = 0.0;
  double value = 0.0;
};

/// phi_delta, or p itself when delta == 0.
inline Categorical aligned_model(const Categorical& p, const Categorical& q, double delta) {
  return solve_alpha_for_kl(q, p, delta).phi;
}

inline RatePoint rate_function(const Categorical& p, const Categorical& q, double delta,
                               double t) {
  const auto base = aligned_model(p, q, delta);
  const double beta = solve_beta_for_reward(q, p, t);
  return {t, beta, kl_divergence(mismatched_tilt(q, p, beta), base)};
}

/// Limit of (1/(m rho)) log E exp(rho log q^m(Y)) under phi_delta^m.
inline CumulantPoint scaled_cumulant(const Categorical& p, const Categorical& q, double delta,
                                     double rho) {
  detail::require(std::isfinite(rho) && rho >= 0.0, ErrorCode::NonPositiveOrder,
                  "rho must be >= 0");
  const auto base = aligned_model(p, q, delta);
  return {rho, -renyi_cross_entropy(base, q, 1.0 + rho)};
}

/// Exact finite-m cumulant by type-class summation, paired with
/// -H_{1+rho}(phi_delta || q). For product measures the two agree at every m.
inline std::pair<double, double> finite_m_cumulant_check(const Categorical& p,
                                                         const Categorical& q, double delta,
                                                         double rho, std::uint32_t m,
                                                         std::uint64_t cap = kDefaultTypeCap) {
  detail::require(std::isfinite(rho) && rho > 0.0, ErrorCode::NonPositiveOrder,
                  "rho must be > 0");
  const auto base = aligned_model(p, q, delta);
  const auto law = product_type_law(base, m, PolicyTag::aligned, cap);
  std::vector<double> terms;
  terms.reserve(law.entries.size());
  for (const auto& e : law.entries) {
    terms.push_back(e.class_log_prob() + rho * type_reward(q, e.type));
  }
  const double exact = numeric::log_sum_exp(terms) / (m * rho);
  return {exact, -renyi_cross_entropy(base, q, 1.0 + rho)};
}

/// Outcome of a window-probability Monte Carlo run. `rate` is empty when no
/// trial landed in the window.
struct DeviationEstimate {
  std::optional<double> rate;
  std::uint64_t hits = 0;
  std::uint64_t trials = 0;
};

/// Draws one sequence for a given trial seed.
using TrialSampler = std::function<Sequence(SeedSpec)>;

/// Counts trials whose per-symbol cross entropy -1/m log q^m(Y) lies within
/// eps of t, and reports -1/m log(hits/trials). Trial i uses
/// derive_seed(seed, i), so the result is independent of `workers`.
inline DeviationEstimate window_deviation_rate(const TrialSampler& draw, const Categorical& q,
                                               double t, double eps, std::uint32_t m,
                                               std::uint64_t trials, SeedSpec seed,
                                               unsigned workers = 1) {
  detail::require(trials >= 1, ErrorCode::BudgetExceeded, "trials must be >= 1");
  detail::require(m >= 1, ErrorCode::LengthMismatch, "sequence length must be >= 1");
  workers = std::max(1u, std::min<unsigned>(workers, static_cast<unsigned>(trials)));
  std::vector<std::uint64_t> hits(workers, 0);
  auto run = [&](unsigned w) {
    const std::uint64_t begin = trials * w / workers;
    const std::uint64_t end = trials * (w + 1) / workers;
    for (std::uint64_t i = begin; i < end; ++i) {
      const auto seq = draw(derive_seed(seed, i));
      const double v = -log_sequence_prob(q, seq) / m;
      if (std::abs(v - t) < eps) ++hits[w];
    }
  };
  if (workers == 1) {
    run(0);
  } else {
    std::vector<std::jthread> pool;
    for (unsigned w = 0; w < workers; ++w) pool.emplace_back(run, w);
  }
  DeviationEstimate out;
  out.trials = trials;
  for (auto h : hits) out.hits += h;
  if (out.hits > 0) {
    out.rate = -std::log(static_cast<double>(out.hits) / static_cast<double>(trials)) / m;
  }
  return out;
}

/// Window estimate under the aligned model phi_delta^m.
inline DeviationEstimate empirical_deviation_rate(const Categorical& p, const Categorical& q,
                                                  double delta, double t, double eps,
                                                  std::uint32_t m, std::uint64_t trials,
                                                  SeedSpec seed, unsigned workers = 1) {
  const auto base = aligned_model(p, q, delta);
  return window_deviation_rate([&](SeedSpec s) { return sample_sequence(base, m, s); }, q, t,
                               eps, m, trials, seed, workers);
}

/// Window estimate under best-of-N from p^m. Used only to probe whether
/// best-of-N tails follow the aligned rate function; nothing is asserted.
inline DeviationEstimate empirical_bon_deviation_rate(const Categorical& p, const Categorical& q,
                                                      std::uint64_t n, double t, double eps,
                                                      std::uint32_t m, std::uint64_t trials,
                                                      SeedSpec seed, unsigned workers = 1) {
  return window_deviation_rate([&](SeedSpec s) { return bon_sample(p, q, m, n, s); }, q, t, eps,
                               m, trials, seed, workers);
}

/// J(t) as sup over gamma of  -gamma t - log sum_k phi_k q_k^gamma,
/// found by grid search with local refinement. Uses neither the beta solver
/// nor any tilt, only the cumulant generating function of log q under phi.
inline double legendre_oracle(const Categorical& p, const Categorical& q, double delta,
                              double t) {
  detail::require(std::isfinite(t) && !is_flat(q) && reachable_cross_entropy_range(q).contains(t),
                  ErrorCode::TargetOutOfRange, "target outside reachable range");
  const auto base = aligned_model(p, q, delta);
  const auto lphi = base.log_probs();
  const auto lq = q.log_probs();
  std::vector<double> terms(lphi.size());
  auto objective = [&](double gamma) {
    for (std::size_t k = 0; k < terms.size(); ++k) terms[k] = lphi[k] + gamma * lq[k];
    return -gamma * t - numeric::log_sum_exp(terms);
  };

  struct Best {
    double arg;
    double value;
    std::size_t index;
  };
  auto scan = [&](double lo, double hi, std::size_t points) {
    Best b{lo, objective(lo), 0};
    for (std::size_t i = 1; i < points; ++i) {
      const double g = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(points - 1);
      const double v = objective(g);
      if (v > b.value) b = {g, v, i};
    }
    return b;
  };

  constexpr std::size_t kCoarse = 201;
  double width = 1.0;
  Best best = scan(-width, width, kCoarse);
  while ((best.index == 0 || best.index == kCoarse - 1) && width < 0x1.0p62) {
    width *= 2.0;
    best = scan(-width, width, kCoarse);
  }

  constexpr std::size_t kFine = 41;
  double half = 2.0 * width / static_cast<double>(kCoarse - 1);
  double previous = best.value;
  for (int it = 0; it < 400; ++it) {
    best = scan(best.arg - half, best.arg + half, kFine);
    const double change = std::abs(best.value - previous);
    previous = best.value;
    half = 2.0 * half / static_cast<double>(kFine - 1);
    if (change < 1e-14 && half < 1e-9 * (1.0 + std::abs(best.arg))) break;
  }
  return std::max(best.value, 0.0);
}

}  // namespace bonalign
