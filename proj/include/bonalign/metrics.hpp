#pragma once

// Information measures on Categorical, all in nats.

#include <algorithm>
#include <cmath>
#include <vector>

#include "bonalign/distribution.hpp"
#include "bonalign/error.hpp"
#include "bonalign/numeric.hpp"

namespace bonalign {

/// Orders with |t - 1| below this use the cross-entropy limit.
inline constexpr double kRenyiUnitWindow = 1e-6;

namespace detail {

inline void require_same_alphabet(const Categorical& p, const Categorical& q) {
  require(p.size() == q.size(), ErrorCode::AlphabetMismatch,
          "alphabet sizes " + std::to_string(p.size()) + " and " + std::to_string(q.size()) +
              " differ");
}

}  // namespace detail

/// H(p||q) = sum_k p_k log(1/q_k).
inline double cross_entropy(const Categorical& p, const Categorical& q) {
  detail::require_same_alphabet(p, q);
  double acc = 0.0;
  for (std::size_t k = 0; k < p.size(); ++k) acc -= p.prob(k) * q.log_prob(k);
  return acc;
}

inline double entropy(const Categorical& p) {
  double acc = 0.0;
  for (std::size_t k = 0; k < p.size(); ++k) acc -= p.prob(k) * p.log_prob(k);
  return acc;
}

/// D(p||q) = sum_k p_k log(p_k/q_k). Computed from log-ratios directly so
/// that p == q gives exactly zero.
inline double kl_divergence(const Categorical& p, const Categorical& q) {
  detail::require_same_alphabet(p, q);
  double acc = 0.0;
  for (std::size_t k = 0; k < p.size(); ++k) {
    acc += p.prob(k) * (p.log_prob(k) - q.log_prob(k));
  }
  return std::max(acc, 0.0);
}

/// Renyi cross entropy of order t > 0:
///   H_t(p||q) = log(sum_k p_k q_k^(t-1)) / (1 - t),
/// continuously extended by H(p||q) for |t - 1| < 1e-6.
inline double renyi_cross_entropy(const Categorical& p, const Categorical& q, double t) {
  detail::require_same_alphabet(p, q);
  detail::require(std::isfinite(t) && t > 0.0, ErrorCode::NonPositiveOrder,
                  "order must be positive, got " + std::to_string(t));
  if (std::abs(t - 1.0) < kRenyiUnitWindow) return cross_entropy(p, q);
  const double s = t - 1.0;
  const auto lq = q.log_probs();
  const double spread = std::abs(s) * std::max(std::abs(*std::min_element(lq.begin(), lq.end())),
                                               std::abs(*std::max_element(lq.begin(), lq.end())));
  if (spread <= 1.0) {
    // log sum p_k e^{s log q_k} = log1p(sum p_k expm1(s log q_k)) keeps the
    // digits that the 1/(1-t) factor would otherwise amplify near t = 1.
    double acc = 0.0;
    for (std::size_t k = 0; k < p.size(); ++k) acc += p.prob(k) * std::expm1(s * lq[k]);
    return std::log1p(acc) / (1.0 - t);
  }
  std::vector<double> terms(p.size());
  for (std::size_t k = 0; k < p.size(); ++k) {
    terms[k] = p.log_prob(k) + (t - 1.0) * q.log_prob(k);
  }
  return numeric::log_sum_exp(terms) / (1.0 - t);
}

}  // namespace bonalign
