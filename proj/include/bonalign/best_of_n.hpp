#pragma once

// Best-of-N policy with uniform tie-breaking.
//
// For outcome y at reward level L with cumulative reference masses
// S_le = P(r <= r_L) and S_lt = P(r < r_L),
//
//   pi_N(y) = (S_le^N - S_lt^N) * p(y) / P(L),
//
// evaluated in log space as N log S_le + log(1 - exp(N log(S_lt / S_le))).
// N enters only as a multiplier of log-probabilities, so N = exp(m * delta)
// never has to be materialized and fractional effective N is accepted.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "bonalign/distribution.hpp"
#include "bonalign/error.hpp"
#include "bonalign/metrics.hpp"
#include "bonalign/numeric.hpp"
#include "bonalign/random.hpp"
#include "bonalign/tilt.hpp"

namespace bonalign {

/// Rewards closer than this (absolute, nats) share a level.
inline constexpr double kRewardTieTolerance = 1e-12;

/// Number of candidates, given either as a count or as log N.
class BonConfig {
 public:
  static BonConfig count(std::uint64_t n) {
    detail::require(n >= 1, ErrorCode::InvalidN, "N must be >= 1");
    BonConfig c;
    c.count_ = n;
    return c;
  }

  static BonConfig log_count(double log_n) {
    detail::require(std::isfinite(log_n) && log_n >= 0.0, ErrorCode::InvalidN,
                    "log N must be finite and >= 0");
    BonConfig c;
    c.log_n_ = log_n;
    return c;
  }

  /// N as a real multiplier.
  double multiplier() const { return count_ ? static_cast<double>(*count_) : std::exp(*log_n_); }
  double log_n() const { return count_ ? std::log(static_cast<double>(*count_)) : *log_n_; }
  bool is_identity() const { return count_ ? *count_ == 1 : *log_n_ == 0.0; }
  std::optional<std::uint64_t> count() const { return count_; }

 private:
  BonConfig() = default;
  std::optional<std::uint64_t> count_;
  std::optional<double> log_n_;
};

struct RewardLevel {
  double value = 0.0;
  std::vector<std::size_t> members;
  double level_log_prob = 0.0;
  /// log P(r <= value) and log P(r < value) under the reference.
  double cum_log_prob_le = 0.0;
  double cum_log_prob_lt = numeric::kNegInf;
};

/// Sorts outcomes by reward and merges runs within `tolerance` of the level's
/// lowest member. Levels come out strictly increasing.
///
/// The cumulative masses are taken from whichever side is smaller: lower
/// levels sum from the bottom, upper levels as log1p(-tail) from the top, so
/// S_le stays accurate in relative terms even when it is 1 - 1e-15.
inline std::vector<RewardLevel> group_reward_levels(std::span<const double> rewards,
                                                    std::span<const double> log_probs,
                                                    double tolerance = kRewardTieTolerance) {
  detail::require(rewards.size() == log_probs.size(), ErrorCode::LengthMismatch,
                  "rewards and probabilities differ in length");
  std::vector<std::size_t> order(rewards.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return rewards[a] < rewards[b]; });

  std::vector<RewardLevel> levels;
  for (std::size_t idx : order) {
    if (levels.empty() || rewards[idx] > levels.back().value + tolerance) {
      levels.push_back({rewards[idx], {}, numeric::kNegInf, 0.0, numeric::kNegInf});
    }
    auto& lvl = levels.back();
    lvl.members.push_back(idx);
    lvl.level_log_prob = numeric::log_add_exp(lvl.level_log_prob, log_probs[idx]);
  }

  const std::size_t n = levels.size();
  std::vector<double> from_bottom(n);
  std::vector<double> tail_above(n);
  double acc = numeric::kNegInf;
  for (std::size_t i = 0; i < n; ++i) {
    acc = numeric::log_add_exp(acc, levels[i].level_log_prob);
    from_bottom[i] = acc;
  }
  acc = numeric::kNegInf;
  for (std::size_t i = n; i-- > 0;) {
    tail_above[i] = acc;
    acc = numeric::log_add_exp(acc, levels[i].level_log_prob);
  }
  constexpr double kLogHalf = -std::numbers::ln2;
  for (std::size_t i = 0; i < n; ++i) {
    double le = tail_above[i] < kLogHalf ? numeric::log1m_exp(tail_above[i]) : from_bottom[i];
    levels[i].cum_log_prob_le = std::min(le, 0.0);
    levels[i].cum_log_prob_lt = i == 0 ? numeric::kNegInf : levels[i - 1].cum_log_prob_le;
  }
  return levels;
}

/// log(S_le^N - S_lt^N) for one level.
inline double log_level_bon_mass(const RewardLevel& level, double n) {
  const double a = level.cum_log_prob_le;
  // log(S_lt / S_le) = log(1 - P(L) / S_le)
  const double ratio = std::min(level.level_log_prob - a, 0.0);
  const double log_lt_over_le = numeric::log1m_exp(ratio);
  return n * a + numeric::log1m_exp(n * log_lt_over_le);
}

/// Exact best-of-N law over a flat outcome space.
inline Categorical bon_exact_pmf(const Categorical& outcome_probs, std::span<const double> rewards,
                                 const BonConfig& config) {
  detail::require(rewards.size() == outcome_probs.size(), ErrorCode::LengthMismatch,
                  "expected " + std::to_string(outcome_probs.size()) + " rewards, got " +
                      std::to_string(rewards.size()));
  if (config.is_identity()) return outcome_probs;
  const auto lp = outcome_probs.log_probs();
  const auto levels = group_reward_levels(rewards, lp);
  const double n = config.multiplier();
  std::vector<double> out(lp.size());
  for (const auto& level : levels) {
    const double w = log_level_bon_mass(level, n) - level.level_log_prob;
    for (std::size_t y : level.members) out[y] = w + lp[y];
  }
  return Categorical::from_log_weights(out);
}

inline Categorical bon_exact_pmf(const Categorical& outcome_probs, std::span<const double> rewards,
                                 std::uint64_t n) {
  return bon_exact_pmf(outcome_probs, rewards, BonConfig::count(n));
}

enum class PolicyTag { reference, aligned, best_of_n };

constexpr std::string_view to_string(PolicyTag tag) noexcept {
  switch (tag) {
    case PolicyTag::reference: return "reference";
    case PolicyTag::aligned: return "aligned";
    case PolicyTag::best_of_n: return "best_of_n";
  }
  return "unknown";
}

struct TypeLawEntry {
  TypeVector type;
  /// Probability of any single sequence of this type.
  double per_sequence_log_prob = 0.0;
  double log_class_size = 0.0;

  double class_log_prob() const { return per_sequence_log_prob + log_class_size; }
};

/// Exact law of a length-m exchangeable policy restricted to type classes.
struct TypeLaw {
  std::vector<TypeLawEntry> entries;
  std::uint32_t m = 0;
  std::size_t alphabet_size = 0;
  PolicyTag tag = PolicyTag::reference;

  double total_mass() const {
    double acc = 0.0;
    for (const auto& e : entries) acc += std::exp(e.class_log_prob());
    return acc;
  }
};

/// Law of dist^m over type classes.
inline TypeLaw product_type_law(const Categorical& dist, std::uint32_t m, PolicyTag tag,
                                std::uint64_t cap = kDefaultTypeCap) {
  TypeLaw law{{}, m, dist.size(), tag};
  for (auto& tau : enumerate_types(m, dist.size(), cap)) {
    const double lp = log_type_sequence_prob(dist, tau);
    const double ls = log_type_class_size(tau);
    law.entries.push_back({std::move(tau), lp, ls});
  }
  return law;
}

/// Sum over symbols of counts_k * log q_k: the additive reward of any
/// sequence of type tau.
inline double type_reward(const Categorical& q, const TypeVector& tau) {
  return log_type_sequence_prob(q, tau);
}

/// Exact best-of-N law over sequences of length m drawn from p^m with reward
/// log q^m, grouped by type class.
inline TypeLaw bon_type_law(const Categorical& p, const Categorical& q, std::uint32_t m,
                            const BonConfig& config, std::uint64_t cap = kDefaultTypeCap) {
  detail::require_same_alphabet(p, q);
  auto law = product_type_law(p, m, PolicyTag::best_of_n, cap);
  if (config.is_identity()) return law;

  std::vector<double> rewards(law.entries.size());
  std::vector<double> class_lp(law.entries.size());
  for (std::size_t i = 0; i < law.entries.size(); ++i) {
    rewards[i] = type_reward(q, law.entries[i].type);
    class_lp[i] = law.entries[i].class_log_prob();
  }
  const auto levels = group_reward_levels(rewards, class_lp);
  const double n = config.multiplier();
  for (const auto& level : levels) {
    const double w = log_level_bon_mass(level, n) - level.level_log_prob;
    for (std::size_t i : level.members) law.entries[i].per_sequence_log_prob += w;
  }
  return law;
}

/// Draws N sequences of length m from p and returns one of maximal reward
/// log q^m, breaking ties uniformly with one extra variate from the stream.
inline Sequence bon_sample(const Categorical& p, const Categorical& q, std::uint32_t m,
                           std::uint64_t n, SeedSpec seed,
                           std::uint64_t budget = 100'000'000) {
  detail::require_same_alphabet(p, q);
  detail::require(n >= 1, ErrorCode::InvalidN, "N must be >= 1");
  detail::require(m >= 1, ErrorCode::LengthMismatch, "sequence length must be >= 1");
  detail::require(n <= budget / m, ErrorCode::BudgetExceeded,
                  "N*m exceeds sampling budget " + std::to_string(budget));
  const auto probs = p.probs();
  const CategoricalSampler sampler(probs);
  Rng rng(seed);

  struct Candidate {
    double reward;
    Sequence seq;
  };
  std::vector<Candidate> best;
  double top = numeric::kNegInf;
  Sequence draw(m);
  for (std::uint64_t i = 0; i < n; ++i) {
    double r = 0.0;
    for (auto& s : draw) {
      s = static_cast<Symbol>(sampler(rng));
      r += q.log_prob(s);
    }
    if (r > top + kRewardTieTolerance) {
      best.clear();
      top = r;
    } else if (r < top - kRewardTieTolerance) {
      continue;
    }
    top = std::max(top, r);
    best.push_back({r, draw});
  }
  std::erase_if(best, [&](const Candidate& c) { return c.reward < top - kRewardTieTolerance; });
  return best[rng.below(best.size())].seq;
}

/// E[t(Y)] under the law: a point on the simplex.
inline std::vector<double> bon_expected_type(const TypeLaw& law) {
  std::vector<double> out(law.alphabet_size, 0.0);
  for (const auto& e : law.entries) {
    const double mass = std::exp(e.class_log_prob());
    for (std::size_t k = 0; k < out.size(); ++k) {
      out[k] += mass * e.type.count(k) / static_cast<double>(law.m);
    }
  }
  return out;
}

/// D(law || dist^m), summed over type classes.
inline double type_law_kl(const TypeLaw& law, const Categorical& dist) {
  detail::require(law.alphabet_size == dist.size(), ErrorCode::AlphabetMismatch,
                  "law and distribution alphabets differ");
  double acc = 0.0;
  for (const auto& e : law.entries) {
    const double mass = std::exp(e.class_log_prob());
    if (mass == 0.0) continue;
    acc += mass * (e.per_sequence_log_prob - log_type_sequence_prob(dist, e.type));
  }
  return std::max(acc, 0.0);
}

/// E[log q^m(Y)] under the law.
inline double type_law_expected_reward(const TypeLaw& law, const Categorical& q) {
  double acc = 0.0;
  for (const auto& e : law.entries) acc += std::exp(e.class_log_prob()) * type_reward(q, e.type);
  return acc;
}

/// D(pi_N^m || p^m). Never exceeds log N.
inline double bon_kl_to_reference(const TypeLaw& law, const Categorical& p) {
  return type_law_kl(law, p);
}

/// (1/m) D(pi_N^m || phi_delta^m) with N = exp(m * delta).
inline double bon_kl_rate_to_optimal(const Categorical& p, const Categorical& q, std::uint32_t m,
                                     double delta, std::uint64_t cap = kDefaultTypeCap) {
  const auto aligned = solve_alpha_for_kl(q, p, delta);
  const auto law = bon_type_law(p, q, m, BonConfig::log_count(m * delta), cap);
  return type_law_kl(law, aligned.phi) / m;
}

}  // namespace bonalign
