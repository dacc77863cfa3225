#pragma once

// Brute-force best-of-N: enumerate every ordered N-tuple of draws, weight it
// by its product probability and split that weight evenly across the tuple
// positions holding the maximal reward. Ground truth for tiny instances only.

#include <cmath>
#include <cstdint>
#include <span>
#include <vector>

#include "bonalign/distribution.hpp"
#include "bonalign/error.hpp"

namespace bonalign {

inline constexpr std::uint64_t kOracleTupleCap = 10'000'000;

/// Best-of-N PMF over M flat outcomes with the given rewards.
inline std::vector<double> bon_enumeration_oracle_flat(std::span<const double> probs,
                                                       std::span<const double> rewards,
                                                       std::uint32_t n,
                                                       std::uint64_t cap = kOracleTupleCap) {
  detail::require(probs.size() == rewards.size(), ErrorCode::LengthMismatch,
                  "probs and rewards differ in length");
  detail::require(n >= 1, ErrorCode::InvalidN, "N must be >= 1");
  const std::size_t outcomes = probs.size();
  std::uint64_t tuples = 1;
  for (std::uint32_t i = 0; i < n; ++i) {
    detail::require(tuples <= cap / outcomes, ErrorCode::SizeOverflow,
                    "(M)^N exceeds the enumeration cap");
    tuples *= outcomes;
  }

  // Extended-precision accumulation: up to 1e7 terms are summed per outcome.
  std::vector<long double> pmf(outcomes, 0.0L);
  std::vector<std::size_t> tuple(n, 0);
  for (std::uint64_t t = 0; t < tuples; ++t) {
    long double weight = 1.0L;
    double top = -std::numeric_limits<double>::infinity();
    for (auto y : tuple) {
      weight *= probs[y];
      top = std::max(top, rewards[y]);
    }
    std::uint32_t winners = 0;
    for (auto y : tuple) winners += rewards[y] >= top - 1e-12 ? 1 : 0;
    for (auto y : tuple) {
      if (rewards[y] >= top - 1e-12) pmf[y] += weight / winners;
    }
    for (std::size_t i = n; i-- > 0;) {
      if (++tuple[i] < outcomes) break;
      tuple[i] = 0;
    }
  }
  return {pmf.begin(), pmf.end()};
}

/// Sequence index with the first symbol most significant: sum_i y_i K^(m-1-i).
inline std::size_t sequence_index(std::span<const Symbol> seq, std::size_t k) {
  std::size_t idx = 0;
  for (Symbol s : seq) idx = idx * k + s;
  return idx;
}

inline Sequence sequence_at(std::size_t index, std::uint32_t m, std::size_t k) {
  Sequence seq(m);
  for (std::size_t i = m; i-- > 0;) {
    seq[i] = static_cast<Symbol>(index % k);
    index /= k;
  }
  return seq;
}

/// Full best-of-N PMF over all K^m sequences (indexed by sequence_index),
/// reference p^m and reward log q^m.
inline std::vector<double> bon_enumeration_oracle(const Categorical& p, const Categorical& q,
                                                  std::uint32_t m, std::uint32_t n,
                                                  std::uint64_t cap = kOracleTupleCap) {
  detail::require(p.size() == q.size(), ErrorCode::AlphabetMismatch, "alphabets differ");
  const std::size_t k = p.size();
  std::uint64_t seqs = 1;
  for (std::uint32_t i = 0; i < m; ++i) {
    detail::require(seqs <= cap / k, ErrorCode::SizeOverflow, "K^m exceeds the enumeration cap");
    seqs *= k;
  }
  const auto pk = p.probs();
  std::vector<double> probs(seqs);
  std::vector<double> rewards(seqs);
  for (std::size_t idx = 0; idx < seqs; ++idx) {
    const auto seq = sequence_at(idx, m, k);
    long double pr = 1.0L;
    double r = 0.0;
    for (Symbol s : seq) {
      pr *= pk[s];
      r += std::log(q.prob(s));
    }
    probs[idx] = static_cast<double>(pr);
    rewards[idx] = r;
  }
  return bon_enumeration_oracle_flat(probs, rewards, n, cap);
}

}  // namespace bonalign
