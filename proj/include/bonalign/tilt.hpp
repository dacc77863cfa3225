#pragma once

// The mismatched tilt T(q, p, alpha) ∝ p_k q_k^alpha and its two scalar
// inversions: the KL budget -> alpha map that yields the optimal
// KL-constrained policy, and the reward target -> beta map used by the
// rate functions.

#include <algorithm>
#include <cmath>
#include <span>
#include <vector>

#include "bonalign/distribution.hpp"
#include "bonalign/error.hpp"
#include "bonalign/metrics.hpp"
#include "bonalign/numeric.hpp"

namespace bonalign {

/// Budgets closer than this to the supremum are rejected.
inline constexpr double kFeasibilityMargin = 1e-9;
/// Log-probabilities of q within this of max(log q) count as maximizers.
inline constexpr double kArgmaxTolerance = 1e-12;

struct TiltSolution {
  double alpha = 0.0;
  Categorical phi;
  double achieved_kl = 0.0;
  /// -H(phi||q); reward of symbol k is log q_k.
  double expected_reward = 0.0;
};

struct TradeoffPoint {
  double delta = 0.0;
  double alpha = 0.0;
  double expected_reward = 0.0;
};

struct RootFindOptions {
  int max_doublings = 200;
  int max_bisections = 200;
  double residual_tolerance = 1e-12;
};

inline Categorical mismatched_tilt(const Categorical& q, const Categorical& p, double alpha) {
  detail::require_same_alphabet(p, q);
  if (alpha == 0.0) return p;
  std::vector<double> logw(p.size());
  for (std::size_t k = 0; k < p.size(); ++k) {
    logw[k] = p.log_prob(k) + alpha * q.log_prob(k);
  }
  return Categorical::from_log_weights(logw);
}

/// True when q is constant, in which case the tilt family is the single point p.
inline bool is_flat(const Categorical& q) {
  const auto lq = q.log_probs();
  const auto [lo, hi] = std::minmax_element(lq.begin(), lq.end());
  return *hi - *lo <= kArgmaxTolerance;
}

/// sup over alpha >= 0 of D(T(q,p,alpha) || p) = log(1 / sum_{k in argmax q} p_k).
inline double max_achievable_kl(const Categorical& q, const Categorical& p) {
  detail::require_same_alphabet(p, q);
  const auto lq = q.log_probs();
  const double top = *std::max_element(lq.begin(), lq.end());
  std::vector<double> mass;
  for (std::size_t k = 0; k < q.size(); ++k) {
    if (lq[k] >= top - kArgmaxTolerance) mass.push_back(p.log_prob(k));
  }
  if (mass.size() == p.size()) return 0.0;
  return std::max(0.0, -numeric::log_sum_exp(mass));
}

/// Finds alpha >= 0 with D(T(q,p,alpha) || p) = delta.
///
/// KL is strictly increasing in alpha for non-flat q, so the root is bracketed
/// from [0, 1] by doubling the upper end, then bisected.
inline TiltSolution solve_alpha_for_kl(const Categorical& q, const Categorical& p, double delta,
                                       const RootFindOptions& opts = {}) {
  detail::require_same_alphabet(p, q);
  detail::require(std::isfinite(delta) && delta >= 0.0, ErrorCode::InfeasibleBudget,
                  "budget must be a nonnegative finite number");
  if (delta == 0.0) return {0.0, p, 0.0, -cross_entropy(p, q)};
  detail::require(!is_flat(q), ErrorCode::DegenerateFamily,
                  "q is uniform; the aligned family is the single point p");
  const double sup = max_achievable_kl(q, p);
  detail::require(delta < sup - kFeasibilityMargin, ErrorCode::InfeasibleBudget,
                  "budget " + std::to_string(delta) + " is not below the supremum " +
                      std::to_string(sup));

  auto residual = [&](double a) { return kl_divergence(mismatched_tilt(q, p, a), p) - delta; };

  double lo = 0.0;
  double hi = 1.0;
  int doublings = 0;
  while (residual(hi) < 0.0) {
    detail::require(++doublings <= opts.max_doublings, ErrorCode::InfeasibleBudget,
                    "could not bracket alpha");
    lo = hi;
    hi *= 2.0;
  }
  double best = hi;
  double best_abs = std::abs(residual(hi));
  for (int it = 0; it < opts.max_bisections; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    const double r = residual(mid);
    if (std::abs(r) < best_abs) {
      best = mid;
      best_abs = std::abs(r);
    }
    if (best_abs <= opts.residual_tolerance) break;
    (r < 0.0 ? lo : hi) = mid;
  }
  auto phi = mismatched_tilt(q, p, best);
  const double achieved = kl_divergence(phi, p);
  const double reward = -cross_entropy(phi, q);
  return {best, std::move(phi), achieved, reward};
}

/// Open interval (log 1/max q, log 1/min q) of per-symbol cross entropies
/// reachable by tilting, shrunk by 1e-6 of its width at both ends.
struct ReachableRange {
  double lower = 0.0;
  double upper = 0.0;
  bool contains(double t) const { return t > lower && t < upper; }
};

inline constexpr double kRangeMarginFraction = 1e-6;

inline ReachableRange reachable_cross_entropy_range(const Categorical& q) {
  const auto lq = q.log_probs();
  const auto [lo, hi] = std::minmax_element(lq.begin(), lq.end());
  const double a = -*hi;
  const double b = -*lo;
  const double margin = kRangeMarginFraction * (b - a);
  return {a + margin, b - margin};
}

/// Finds beta in R with H(T(q,p,beta) || q) = t. The map is strictly
/// decreasing in beta, from log 1/min q at -inf to log 1/max q at +inf.
inline double solve_beta_for_reward(const Categorical& q, const Categorical& p, double t,
                                    const RootFindOptions& opts = {}) {
  detail::require_same_alphabet(p, q);
  detail::require(std::isfinite(t), ErrorCode::TargetOutOfRange, "target is not finite");
  detail::require(!is_flat(q), ErrorCode::TargetOutOfRange,
                  "q is uniform; only t = log K is reachable");
  const auto range = reachable_cross_entropy_range(q);
  detail::require(range.contains(t), ErrorCode::TargetOutOfRange,
                  "target " + std::to_string(t) + " outside reachable range (" +
                      std::to_string(range.lower) + ", " + std::to_string(range.upper) + ")");

  auto residual = [&](double b) { return cross_entropy(mismatched_tilt(q, p, b), q) - t; };
  if (residual(0.0) == 0.0) return 0.0;

  double lo = -1.0;
  double hi = 1.0;
  for (int i = 0; residual(hi) > 0.0; ++i) {
    detail::require(i < opts.max_doublings, ErrorCode::TargetOutOfRange, "cannot bracket beta");
    lo = hi;
    hi *= 2.0;
  }
  for (int i = 0; residual(lo) < 0.0; ++i) {
    detail::require(i < opts.max_doublings, ErrorCode::TargetOutOfRange, "cannot bracket beta");
    hi = lo;
    lo *= 2.0;
  }
  double best = lo;
  double best_abs = std::abs(residual(lo));
  for (int it = 0; it < opts.max_bisections + 100; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    const double r = residual(mid);
    if (std::abs(r) < best_abs) {
      best = mid;
      best_abs = std::abs(r);
    }
    if (best_abs <= opts.residual_tolerance) break;
    (r > 0.0 ? lo : hi) = mid;
  }
  return best;
}

/// Expected reward against KL budget along the aligned family.
inline std::vector<TradeoffPoint> tradeoff_curve(const Categorical& q, const Categorical& p,
                                                 std::span<const double> deltas) {
  std::vector<TradeoffPoint> out;
  out.reserve(deltas.size());
  for (double d : deltas) {
    const auto sol = solve_alpha_for_kl(q, p, d);
    out.push_back({d, sol.alpha, sol.expected_reward});
  }
  return out;
}

/// L-infinity distance between T(q, T(q,p,alpha), beta) and T(q, p, alpha+beta).
/// The identity is exact; the returned value is pure rounding.
inline double tilt_compose_check(const Categorical& q, const Categorical& p, double alpha,
                                 double beta) {
  const auto twice = mismatched_tilt(q, mismatched_tilt(q, p, alpha), beta);
  const auto once = mismatched_tilt(q, p, alpha + beta);
  double worst = 0.0;
  for (std::size_t k = 0; k < p.size(); ++k) {
    worst = std::max(worst, std::abs(twice.prob(k) - once.prob(k)));
  }
  return worst;
}

}  // namespace bonalign
