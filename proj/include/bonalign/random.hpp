#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <random>
#include <span>
#include <vector>

namespace bonalign {

/// Explicit 64-bit seed. Every stochastic operation takes one; there is no
/// hidden global state.
struct SeedSpec {
  std::uint64_t value = 0;
};

/// splitmix64 finalizer.
constexpr std::uint64_t mix64(std::uint64_t x) noexcept {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

/// Per-unit seed from (master, unit index). Results that depend only on these
/// derived seeds do not depend on how units are scheduled across workers.
constexpr SeedSpec derive_seed(SeedSpec master, std::uint64_t index) noexcept {
  return SeedSpec{mix64(mix64(master.value) ^ mix64(index + 0x632be59bd9b4e019ULL))};
}

/// Thin wrapper over mt19937_64 that produces variates with portable bit-level
/// recipes (the std distributions are implementation-defined).
class Rng {
 public:
  explicit Rng(SeedSpec seed) : engine_(seed.value) {}

  /// Uniform on [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  /// Uniform integer in [0, n).
  std::size_t below(std::size_t n) {
    const auto k = static_cast<std::size_t>(uniform() * static_cast<double>(n));
    return std::min(k, n - 1);
  }

  /// Standard exponential by inversion.
  double exponential() { return -std::log1p(-uniform()); }

  std::mt19937_64& engine() { return engine_; }

 private:
  std::mt19937_64 engine_;
};

/// Inverse-CDF sampler over a fixed probability vector.
class CategoricalSampler {
 public:
  explicit CategoricalSampler(std::span<const double> probs) : cdf_(probs.size()) {
    double acc = 0.0;
    for (std::size_t k = 0; k < probs.size(); ++k) {
      acc += probs[k];
      cdf_[k] = acc;
    }
    // Guard against the last partial sum landing just below 1.
    for (auto& c : cdf_) c /= acc;
    cdf_.back() = 1.0;
  }

  std::size_t operator()(Rng& rng) const {
    const double u = rng.uniform();
    const auto it = std::upper_bound(cdf_.begin(), cdf_.end(), u);
    return std::min(static_cast<std::size_t>(it - cdf_.begin()), cdf_.size() - 1);
  }

 private:
  std::vector<double> cdf_;
};

/// Flat Dirichlet draw (uniform on the simplex) as normalized exponentials.
inline std::vector<double> flat_dirichlet(std::size_t k, Rng& rng) {
  std::vector<double> w(k);
  double total = 0.0;
  for (auto& x : w) {
    x = rng.exponential();
    total += x;
  }
  for (auto& x : w) x /= total;
  return w;
}

}  // namespace bonalign
