#include <gtest/gtest.h>

#include <array>
#include <cmath>
#include <map>

#include "bonalign/best_of_n.hpp"
#include "bonalign/bon_oracle.hpp"
#include "test_support.hpp"

namespace bonalign {
namespace {

using testing::ternary_p;
using testing::ternary_q;

// Table of the two-symbol, two-candidate example, indexed [y1][y2].
const double kTable[3][3] = {
    {49.0 / 625, 21.0 / 250, 43.0 / 250},
    {21.0 / 250, 81.0 / 10000, 9.0 / 125},
    {43.0 / 250, 9.0 / 125, 103.0 / 400},
};

struct Flat {
  Categorical probs;
  std::vector<double> rewards;
};

/// Pairs (y1, y2) flattened to 9 outcomes with index 3*y1 + y2.
Flat example1_flat() {
  const auto p = ternary_p();
  std::vector<double> w;
  std::vector<double> r;
  // Rewards log 6, 0, log 2 per symbol.
  const double sym_r[3] = {std::log(6.0), 0.0, std::log(2.0)};
  for (int a = 0; a < 3; ++a)
    for (int b = 0; b < 3; ++b) {
      w.push_back(p.prob(a) * p.prob(b));
      r.push_back(sym_r[a] + sym_r[b]);
    }
  return {Categorical::from_weights(w), r};
}

/// Expands a type law into the per-sequence PMF indexed like the oracle.
std::vector<double> expand(const TypeLaw& law) {
  std::size_t total = 1;
  for (std::uint32_t i = 0; i < law.m; ++i) total *= law.alphabet_size;
  std::map<std::vector<std::uint32_t>, double> by_type;
  for (const auto& e : law.entries) {
    by_type[{e.type.counts().begin(), e.type.counts().end()}] = e.per_sequence_log_prob;
  }
  std::vector<double> out(total);
  for (std::size_t idx = 0; idx < total; ++idx) {
    const auto tau = type_of(sequence_at(idx, law.m, law.alphabet_size), law.alphabet_size);
    out[idx] = std::exp(by_type.at({tau.counts().begin(), tau.counts().end()}));
  }
  return out;
}

TEST(BonExactPmf, IdentityAtNOne) {
  const auto ex = example1_flat();
  EXPECT_EQ(bon_exact_pmf(ex.probs, ex.rewards, 1), ex.probs);
}

TEST(BonExactPmf, ReproducesTable) {
  const auto ex = example1_flat();
  const auto pi = bon_exact_pmf(ex.probs, ex.rewards, 2);
  for (int a = 0; a < 3; ++a)
    for (int b = 0; b < 3; ++b) EXPECT_NEAR(pi.prob(3 * a + b), kTable[a][b], 1e-15);
}

TEST(BonExactPmf, AllTiedKeepsReference) {
  Rng rng(SeedSpec{1});
  const auto p = testing::random_categorical(6, rng);
  const std::vector<double> r(6, -0.7);
  for (std::uint64_t n : {2u, 7u, 1000u}) {
    const auto pi = bon_exact_pmf(p, r, n);
    for (std::size_t k = 0; k < 6; ++k) EXPECT_NEAR(pi.prob(k), p.prob(k), 1e-14);
  }
}

TEST(BonExactPmf, Errors) {
  const auto p = ternary_p();
  const std::vector<double> short_r{0.0, 1.0};
  try {
    bon_exact_pmf(p, short_r, 2);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::LengthMismatch);
  }
  try {
    BonConfig::count(0);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::InvalidN);
  }
  try {
    BonConfig::log_count(-0.5);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::InvalidN);
  }
}

TEST(RewardLevels, GroupsTiesAndAccumulates) {
  const std::vector<double> r{0.5, 0.1, 0.5 + 1e-14, 0.3};
  const std::vector<double> lp{std::log(0.1), std::log(0.2), std::log(0.3), std::log(0.4)};
  const auto levels = group_reward_levels(r, lp);
  ASSERT_EQ(levels.size(), 3u);
  EXPECT_EQ(levels[2].members, (std::vector<std::size_t>{0, 2}));
  EXPECT_NEAR(std::exp(levels[2].level_log_prob), 0.4, 1e-15);
  EXPECT_NEAR(std::exp(levels[2].cum_log_prob_le), 1.0, 1e-12);
  EXPECT_NEAR(std::exp(levels[1].cum_log_prob_le), 0.6, 1e-15);
  EXPECT_NEAR(std::exp(levels[1].cum_log_prob_lt), 0.2, 1e-15);
  EXPECT_EQ(levels[0].cum_log_prob_lt, numeric::kNegInf);
}

TEST(BonTypeLaw, Example1Marginal) {
  const auto law = bon_type_law(ternary_p(), ternary_q(), 2, BonConfig::count(2));
  const auto joint = expand(law);
  double marginal = 0.0;
  for (int b = 0; b < 3; ++b) marginal += joint[b];  // y1 = 0
  EXPECT_NEAR(marginal, 209.0 / 625, 1e-15);
  for (int a = 0; a < 3; ++a)
    for (int b = 0; b < 3; ++b) EXPECT_NEAR(joint[3 * a + b], kTable[a][b], 1e-15);
}

TEST(BonTypeLaw, NOneIsReference) {
  const auto law = bon_type_law(ternary_p(), ternary_q(), 5, BonConfig::count(1));
  const auto ref = product_type_law(ternary_p(), 5, PolicyTag::reference);
  ASSERT_EQ(law.entries.size(), ref.entries.size());
  for (std::size_t i = 0; i < law.entries.size(); ++i) {
    EXPECT_EQ(law.entries[i].per_sequence_log_prob, ref.entries[i].per_sequence_log_prob);
  }
  EXPECT_EQ(law.tag, PolicyTag::best_of_n);
}

TEST(BonTypeLaw, MatchesOracleBinaryLength3) {
  Rng rng(SeedSpec{3});
  const auto p = testing::random_categorical(2, rng);
  const auto q = testing::random_categorical(2, rng);
  const auto got = expand(bon_type_law(p, q, 3, BonConfig::count(3)));
  const auto want = bon_enumeration_oracle(p, q, 3, 3);
  for (std::size_t i = 0; i < got.size(); ++i) EXPECT_NEAR(got[i], want[i], 1e-12);
}

TEST(BonOracle, Table) {
  const auto pi = bon_enumeration_oracle(ternary_p(), ternary_q(), 2, 2);
  ASSERT_EQ(pi.size(), 9u);
  for (int a = 0; a < 3; ++a)
    for (int b = 0; b < 3; ++b) EXPECT_NEAR(pi[3 * a + b], kTable[a][b], 1e-15);
}

TEST(BonOracle, NOneIsProduct) {
  const auto p = ternary_p();
  const auto pi = bon_enumeration_oracle(p, ternary_q(), 3, 1);
  for (std::size_t idx = 0; idx < pi.size(); ++idx) {
    EXPECT_NEAR(pi[idx], std::exp(log_sequence_prob(p, sequence_at(idx, 3, 3))), 1e-15);
  }
}

TEST(BonOracle, BinaryHandEnumeration) {
  // Symbol 0 has the larger reward, so it wins unless all three draws are 1.
  const auto p = Categorical::from_weights({0.4, 0.6});
  const auto q = Categorical::from_weights({0.9, 0.1});
  const auto pi = bon_enumeration_oracle(p, q, 1, 3);
  EXPECT_NEAR(pi[0], 1 - 0.6 * 0.6 * 0.6, 1e-15);
  EXPECT_NEAR(pi[0], 0.784, 1e-15);
}

TEST(BonOracle, SizeCap) {
  try {
    bon_enumeration_oracle(ternary_p(), ternary_q(), 4, 5);  // 81^5 > 1e7
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::SizeOverflow);
  }
}

TEST(BonOracle, ExactAndTypeLawAgreeOnRandomInstances) {
  struct Shape {
    std::size_t k;
    std::uint32_t m;
    std::uint32_t max_n;
  };
  const std::array<Shape, 6> shapes{{{2, 1, 16}, {2, 2, 8}, {2, 3, 5}, {3, 1, 10}, {3, 2, 5},
                                     {4, 2, 4}}};
  Rng rng(SeedSpec{99});
  int instances = 0;
  for (int rep = 0; rep < 10; ++rep) {
    for (const auto& s : shapes) {
      const auto p = testing::random_categorical(s.k, rng);
      // Every other instance uses a q with a built-in reward tie.
      auto qw = flat_dirichlet(s.k, rng);
      if (rep % 2) qw[1] = qw[0];
      const auto q = Categorical::from_weights(qw);
      const auto n = static_cast<std::uint32_t>(1 + rng.below(s.max_n));
      const auto oracle = bon_enumeration_oracle(p, q, s.m, n);
      const auto law = expand(bon_type_law(p, q, s.m, BonConfig::count(n)));
      // Flat route over the product outcome space.
      std::vector<double> w(oracle.size());
      std::vector<double> r(oracle.size());
      for (std::size_t idx = 0; idx < w.size(); ++idx) {
        const auto seq = sequence_at(idx, s.m, s.k);
        w[idx] = log_sequence_prob(p, seq);
        r[idx] = log_sequence_prob(q, seq);
      }
      const auto flat = bon_exact_pmf(Categorical::from_log_weights(w), r, n).probs();
      for (std::size_t i = 0; i < oracle.size(); ++i) {
        EXPECT_NEAR(law[i], oracle[i], 1e-12);
        EXPECT_NEAR(flat[i], oracle[i], 1e-12);
      }
      ++instances;
    }
  }
  EXPECT_GE(instances, 50);
}

TEST(BonTypeLaw, ExchangeableAndNotProduct) {
  const auto joint = expand(bon_type_law(ternary_p(), ternary_q(), 2, BonConfig::count(2)));
  for (int a = 0; a < 3; ++a)
    for (int b = 0; b < 3; ++b) EXPECT_EQ(joint[3 * a + b], joint[3 * b + a]);
  // 49/625 vs (209/625)^2 in exact integer arithmetic: 49 * 625 vs 209^2.
  EXPECT_NE(49LL * 625LL, 209LL * 209LL);
  EXPECT_GT(std::abs(joint[0] - (209.0 / 625) * (209.0 / 625)), 1e-3);
  Rng rng(SeedSpec{5});
  for (int i = 0; i < 20; ++i) {
    const auto p = testing::random_categorical(4, rng);
    const auto q = testing::random_categorical(4, rng);
    const auto j = expand(bon_type_law(p, q, 2, BonConfig::count(1 + rng.below(50))));
    for (int a = 0; a < 4; ++a)
      for (int b = 0; b < 4; ++b) EXPECT_EQ(j[4 * a + b], j[4 * b + a]);
  }
}

TEST(BonTypeLaw, NormalizedEvenForHugeN) {
  const auto law = bon_type_law(ternary_p(), ternary_q(), 200, BonConfig::log_count(200 * 0.11));
  EXPECT_NEAR(law.total_mass(), 1.0, 1e-9);
  EXPECT_LE(bon_kl_to_reference(law, ternary_p()), 200 * 0.11 + 1e-9);
  const auto big = bon_type_law(ternary_p(), ternary_q(), 30, BonConfig::log_count(60.0));
  EXPECT_NEAR(big.total_mass(), 1.0, 1e-9);
}

TEST(BonSample, Reproducible) {
  EXPECT_EQ(bon_sample(ternary_p(), ternary_q(), 10, 5, SeedSpec{9}),
            bon_sample(ternary_p(), ternary_q(), 10, 5, SeedSpec{9}));
}

TEST(BonSample, BudgetAndN) {
  try {
    bon_sample(ternary_p(), ternary_q(), 1000, 1000, SeedSpec{1}, 1000);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::BudgetExceeded);
  }
  try {
    bon_sample(ternary_p(), ternary_q(), 3, 0, SeedSpec{1});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::InvalidN);
  }
}

TEST(BonSample, NOneMatchesReferenceChiSquare) {
  const auto p = ternary_p();
  constexpr int kDraws = 20000;
  std::vector<double> counts(9, 0.0);
  for (int i = 0; i < kDraws; ++i) {
    const auto s = bon_sample(p, ternary_q(), 2, 1, derive_seed(SeedSpec{7}, i));
    counts[sequence_index(s, 3)] += 1;
  }
  double chi2 = 0.0;
  for (std::size_t idx = 0; idx < 9; ++idx) {
    const double e = kDraws * std::exp(log_sequence_prob(p, sequence_at(idx, 2, 3)));
    chi2 += (counts[idx] - e) * (counts[idx] - e) / e;
  }
  EXPECT_LT(chi2, 26.12);  // chi-square, 8 dof, 0.999 quantile
}

TEST(BonSample, EmpiricalTableWithinThreeSigma) {
  constexpr int kDraws = 1'000'000;
  std::vector<double> counts(9, 0.0);
  for (int i = 0; i < kDraws; ++i) {
    const auto s = bon_sample(ternary_p(), ternary_q(), 2, 2, derive_seed(SeedSpec{2024}, i));
    counts[sequence_index(s, 3)] += 1;
  }
  for (int a = 0; a < 3; ++a)
    for (int b = 0; b < 3; ++b) {
      const double pi = kTable[a][b];
      const double sigma = std::sqrt(pi * (1 - pi) / kDraws);
      EXPECT_LE(std::abs(counts[3 * a + b] / kDraws - pi), 3 * sigma) << a << b;
    }
}

TEST(BonExpectedType, Examples) {
  const auto id = bon_expected_type(bon_type_law(ternary_p(), ternary_q(), 7, BonConfig::count(1)));
  for (std::size_t k = 0; k < 3; ++k) EXPECT_NEAR(id[k], ternary_p().prob(k), 1e-14);

  // Frozen from tests/oracles/compute_fixtures.py.
  const std::vector<double> fixture{0.29747177358062076991, 0.21209210005918757783,
                                    0.49043612636019165226};
  const auto et = bon_expected_type(bon_type_law(ternary_p(), ternary_q(), 10, BonConfig::count(3)));
  for (std::size_t k = 0; k < 3; ++k) EXPECT_NEAR(et[k], fixture[k], 1e-13);
  const auto phi = solve_alpha_for_kl(ternary_q(), ternary_p(), 0.11).phi.probs();
  EXPECT_NEAR(testing::l1(et, phi), 0.18384944252291658271, 1e-10);
  EXPECT_LT(testing::l1(et, phi), testing::l1(ternary_p().probs(), phi));

  // From the table directly: E[t] = (E[1{y1=k}] + E[1{y2=k}]) / 2.
  std::vector<double> from_table(3, 0.0);
  for (int a = 0; a < 3; ++a)
    for (int b = 0; b < 3; ++b) {
      from_table[a] += kTable[a][b] / 2;
      from_table[b] += kTable[a][b] / 2;
    }
  const auto m2 = bon_expected_type(bon_type_law(ternary_p(), ternary_q(), 2, BonConfig::count(2)));
  for (std::size_t k = 0; k < 3; ++k) EXPECT_NEAR(m2[k], from_table[k], 1e-15);
}

TEST(BonKlToReference, Examples) {
  const auto p = ternary_p();
  EXPECT_EQ(bon_kl_to_reference(bon_type_law(p, ternary_q(), 4, BonConfig::count(1)), p), 0.0);

  double from_table = 0.0;
  for (int a = 0; a < 3; ++a)
    for (int b = 0; b < 3; ++b) {
      from_table += kTable[a][b] * std::log(kTable[a][b] / (p.prob(a) * p.prob(b)));
    }
  const double ex1 = bon_kl_to_reference(bon_type_law(p, ternary_q(), 2, BonConfig::count(2)), p);
  EXPECT_NEAR(ex1, from_table, 1e-14);
  EXPECT_NEAR(ex1, 0.1782612094340630293, 1e-14);
  EXPECT_LT(ex1, std::log(2.0));

  const double fig = bon_kl_to_reference(bon_type_law(p, ternary_q(), 10, BonConfig::count(3)), p);
  EXPECT_NEAR(fig, 0.43062636171335168323, 1e-12);
  EXPECT_LE(fig, std::log(3.0));
}

TEST(BonKlToReference, NeverExceedsLogN) {
  Rng rng(SeedSpec{77});
  for (int i = 0; i < 200; ++i) {
    const std::size_t k = 2 + rng.below(4);
    const std::uint32_t m = 1 + static_cast<std::uint32_t>(rng.below(12));
    const auto p = testing::random_categorical(k, rng);
    const auto q = testing::random_categorical(k, rng);
    const auto n = 1 + rng.below(5000);
    const auto law = bon_type_law(p, q, m, BonConfig::count(n));
    EXPECT_NEAR(law.total_mass(), 1.0, 1e-9);
    EXPECT_LE(bon_kl_to_reference(law, p), std::log(static_cast<double>(n)) + 1e-9);
  }
}

TEST(BonKlRateToOptimal, Fixtures) {
  const auto p = ternary_p();
  const auto q = ternary_q();
  EXPECT_EQ(bon_kl_rate_to_optimal(p, q, 6, 0.0), 0.0);
  EXPECT_NEAR(bon_kl_rate_to_optimal(p, q, 5, 0.11), 0.040352761718387236356, 1e-10);
  EXPECT_NEAR(bon_kl_rate_to_optimal(p, q, 10, 0.11), 0.028309544729179156926, 1e-10);
  EXPECT_NEAR(bon_kl_rate_to_optimal(p, q, 20, 0.11), 0.020150933030232298314, 1e-10);
  double prev = INFINITY;
  for (std::uint32_t m : {5u, 10u, 20u, 40u, 80u, 160u}) {
    const double r = bon_kl_rate_to_optimal(p, q, m, 0.11);
    EXPECT_GT(r, 0.0);
    EXPECT_LT(r, prev) << m;
    prev = r;
  }
}

TEST(BonTypeLaw, TypeAndRewardConverge) {
  const auto p = ternary_p();
  const auto q = ternary_q();
  const auto sol = solve_alpha_for_kl(q, p, 0.11);
  const auto phi = sol.phi.probs();
  double prev_l1 = INFINITY;
  double prev_gap = INFINITY;
  for (std::uint32_t m : {5u, 10u, 20u, 40u, 80u}) {
    const auto law = bon_type_law(p, q, m, BonConfig::log_count(m * 0.11));
    const double d = testing::l1(bon_expected_type(law), phi);
    const double gap = std::abs(type_law_expected_reward(law, q) / m - sol.expected_reward);
    EXPECT_LT(d, prev_l1) << m;
    EXPECT_LT(gap, prev_gap) << m;
    prev_l1 = d;
    prev_gap = gap;
  }
}

}  // namespace
}  // namespace bonalign
