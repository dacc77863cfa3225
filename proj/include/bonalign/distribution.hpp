#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>
#include <span>
#include <string>
#include <vector>

#include "bonalign/error.hpp"
#include "bonalign/numeric.hpp"
#include "bonalign/random.hpp"

namespace bonalign {

/// Strictly positive probability vector over K >= 2 symbols, held as natural
/// log-probabilities. Immutable after construction.
class Categorical {
 public:
  /// Normalizes positive finite weights. (2, 3, 5) gives (0.2, 0.3, 0.5).
  static Categorical from_weights(std::span<const double> weights) {
    detail::require(weights.size() >= 2, ErrorCode::AlphabetTooSmall,
                    "alphabet size " + std::to_string(weights.size()) + " < 2");
    std::vector<double> logw(weights.size());
    for (std::size_t k = 0; k < weights.size(); ++k) {
      const double w = weights[k];
      detail::require(std::isfinite(w) && w > 0.0, ErrorCode::NonPositiveWeight,
                      "weight " + std::to_string(k) + " is not a positive finite number");
      logw[k] = std::log(w);
    }
    return from_log_weights(logw);
  }

  static Categorical from_weights(std::initializer_list<double> weights) {
    return from_weights(std::span<const double>(weights.begin(), weights.size()));
  }

  /// Normalizes finite log-weights with log-sum-exp.
  static Categorical from_log_weights(std::span<const double> log_weights) {
    detail::require(log_weights.size() >= 2, ErrorCode::AlphabetTooSmall,
                    "alphabet size " + std::to_string(log_weights.size()) + " < 2");
    for (std::size_t k = 0; k < log_weights.size(); ++k) {
      detail::require(std::isfinite(log_weights[k]), ErrorCode::NonPositiveWeight,
                      "log-weight " + std::to_string(k) + " is not finite");
    }
    const double lz = numeric::log_sum_exp(log_weights);
    std::vector<double> lp(log_weights.begin(), log_weights.end());
    for (auto& x : lp) x -= lz;
    return Categorical(std::move(lp));
  }

  static Categorical uniform(std::size_t k) {
    detail::require(k >= 2, ErrorCode::AlphabetTooSmall, "alphabet size < 2");
    return Categorical(std::vector<double>(k, -std::log(static_cast<double>(k))));
  }

  std::size_t size() const noexcept { return log_probs_.size(); }
  double log_prob(std::size_t k) const { return log_probs_.at(k); }
  double prob(std::size_t k) const { return std::exp(log_probs_.at(k)); }
  std::span<const double> log_probs() const noexcept { return log_probs_; }

  std::vector<double> probs() const {
    std::vector<double> out(log_probs_.size());
    std::transform(log_probs_.begin(), log_probs_.end(), out.begin(),
                   [](double x) { return std::exp(x); });
    return out;
  }

  friend bool operator==(const Categorical&, const Categorical&) = default;

 private:
  explicit Categorical(std::vector<double> log_probs) : log_probs_(std::move(log_probs)) {}

  std::vector<double> log_probs_;
};

using Symbol = std::uint32_t;
using Sequence = std::vector<Symbol>;

/// Empirical counts of a length-m sequence over K symbols. As a distribution
/// every coordinate is a multiple of 1/m.
class TypeVector {
 public:
  TypeVector() = default;
  explicit TypeVector(std::vector<std::uint32_t> counts)
      : counts_(std::move(counts)),
        length_(std::accumulate(counts_.begin(), counts_.end(), std::uint64_t{0})) {}

  std::span<const std::uint32_t> counts() const noexcept { return counts_; }
  std::uint32_t count(std::size_t k) const { return counts_.at(k); }
  std::size_t size() const noexcept { return counts_.size(); }
  std::uint64_t length() const noexcept { return length_; }

  /// counts / m.
  std::vector<double> frequencies() const {
    std::vector<double> out(counts_.size());
    const auto m = static_cast<double>(length_);
    for (std::size_t k = 0; k < counts_.size(); ++k) out[k] = counts_[k] / m;
    return out;
  }

  friend bool operator==(const TypeVector&, const TypeVector&) = default;

 private:
  std::vector<std::uint32_t> counts_;
  std::uint64_t length_ = 0;
};

inline constexpr std::uint64_t kDefaultTypeCap = 10'000'000;

namespace detail {

inline void check_symbols(std::span<const Symbol> seq, std::size_t k) {
  for (Symbol s : seq) {
    require(s < k, ErrorCode::SymbolOutOfRange,
            "symbol " + std::to_string(s) + " outside alphabet of size " + std::to_string(k));
  }
}

}  // namespace detail

/// Sum over positions of log dist(y_i).
inline double log_sequence_prob(const Categorical& dist, std::span<const Symbol> seq) {
  detail::check_symbols(seq, dist.size());
  double acc = 0.0;
  for (Symbol s : seq) acc += dist.log_prob(s);
  return acc;
}

inline TypeVector type_of(std::span<const Symbol> seq, std::size_t k) {
  detail::check_symbols(seq, k);
  std::vector<std::uint32_t> counts(k, 0);
  for (Symbol s : seq) ++counts[s];
  return TypeVector(std::move(counts));
}

/// Sum over symbols of counts_k * log dist(k), i.e. the per-sequence
/// log-probability shared by every sequence of this type.
inline double log_type_sequence_prob(const Categorical& dist, const TypeVector& tau) {
  detail::require(tau.size() == dist.size(), ErrorCode::AlphabetMismatch,
                  "type and distribution alphabets differ");
  double acc = 0.0;
  for (std::size_t k = 0; k < tau.size(); ++k) {
    if (tau.count(k) != 0) acc += tau.count(k) * dist.log_prob(k);
  }
  return acc;
}

/// Number of compositions of m into k parts, C(m+k-1, k-1), saturating at
/// `cap + 1` so callers can compare without overflow.
inline std::uint64_t count_types(std::uint64_t m, std::uint64_t k, std::uint64_t cap) {
  // C(m+j, j) built incrementally over j = 1..k-1; each step is exact.
  std::uint64_t c = 1;
  for (std::uint64_t j = 1; j < k; ++j) {
    if (c > std::numeric_limits<std::uint64_t>::max() / (m + j)) return cap + 1;
    c = c * (m + j) / j;
    if (c > cap) return cap + 1;
  }
  return c;
}

/// Every type of length m over k symbols, each exactly once, in descending
/// lexicographic order of the count vector: (m,0,..,0) first, (0,..,0,m) last.
inline std::vector<TypeVector> enumerate_types(std::uint32_t m, std::size_t k,
                                               std::uint64_t cap = kDefaultTypeCap) {
  detail::require(k >= 2, ErrorCode::AlphabetTooSmall, "alphabet size < 2");
  detail::require(m >= 1, ErrorCode::LengthMismatch, "sequence length must be >= 1");
  const auto total = count_types(m, k, cap);
  detail::require(total <= cap, ErrorCode::SizeOverflow,
                  "type enumeration for m=" + std::to_string(m) + ", K=" + std::to_string(k) +
                      " exceeds cap " + std::to_string(cap));
  std::vector<TypeVector> out;
  out.reserve(total);
  std::vector<std::uint32_t> counts(k, 0);
  counts[0] = m;
  while (true) {
    out.emplace_back(counts);
    // Advance: find the rightmost nonzero position before the last, move one
    // unit right and sweep the remainder (including the last slot) next to it.
    std::size_t i = k - 1;
    const std::uint32_t tail = counts[k - 1];
    counts[k - 1] = 0;
    do {
      if (i == 0) return out;
      --i;
    } while (counts[i] == 0);
    --counts[i];
    counts[i + 1] = tail + 1;
  }
}

/// log(m! / prod_k counts_k!). The largest count is cancelled against m!
/// term by term, the rest via lgamma.
inline double log_type_class_size(const TypeVector& tau) {
  const auto counts = tau.counts();
  if (counts.empty()) return 0.0;
  const auto largest = *std::max_element(counts.begin(), counts.end());
  double acc = 0.0;
  for (std::uint64_t j = std::uint64_t{largest} + 1; j <= tau.length(); ++j) {
    acc += std::log(static_cast<double>(j));
  }
  bool skipped = false;
  for (auto c : counts) {
    if (!skipped && c == largest) {
      skipped = true;
      continue;
    }
    acc -= std::lgamma(static_cast<double>(c) + 1.0);
  }
  return acc;
}

/// m i.i.d. draws from dist.
inline Sequence sample_sequence(const Categorical& dist, std::uint32_t m, SeedSpec seed) {
  detail::require(m >= 1, ErrorCode::LengthMismatch, "sequence length must be >= 1");
  const auto probs = dist.probs();
  const CategoricalSampler sampler(probs);
  Rng rng(seed);
  Sequence seq(m);
  for (auto& s : seq) s = static_cast<Symbol>(sampler(rng));
  return seq;
}

}  // namespace bonalign
