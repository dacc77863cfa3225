#pragma once

#include <algorithm>
#include <chrono>
#include <cmath>
#include <exception>
#include <span>
#include <thread>
#include <vector>

#include "bonalign/distribution.hpp"
#include "bonalign/experiments/config.hpp"

namespace bonalign::experiments {

/// Reference and alignment distributions of the running ternary example.
inline const std::vector<double>& default_p() {
  static const std::vector<double> p{0.2, 0.3, 0.5};
  return p;
}

inline const std::vector<double>& default_q() {
  static const std::vector<double> q{2.0 / 3.0, 1.0 / 9.0, 2.0 / 9.0};
  return q;
}

inline Categorical config_p(const ExperimentConfig& c) {
  return Categorical::from_weights(c.p.empty() ? default_p() : c.p);
}

inline Categorical config_q(const ExperimentConfig& c) {
  return Categorical::from_weights(c.q.empty() ? default_q() : c.q);
}

inline double l1_distance(std::span<const double> a, std::span<const double> b) {
  double acc = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) acc += std::abs(a[i] - b[i]);
  return acc;
}

/// Calls fn(i) for i in [0, n) on up to `workers` threads with a static
/// partition. Callers write to slot i only, so results never depend on the
/// worker count.
template <class Fn>
void parallel_for(std::size_t n, unsigned workers, Fn&& fn) {
  workers = static_cast<unsigned>(std::max<std::size_t>(1, std::min<std::size_t>(workers, n)));
  if (workers <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::vector<std::exception_ptr> errors(workers);
  {
    std::vector<std::jthread> pool;
    for (unsigned w = 0; w < workers; ++w) {
      pool.emplace_back([&, w] {
        try {
          for (std::size_t i = n * w / workers; i < n * (w + 1) / workers; ++i) fn(i);
        } catch (...) {
          errors[w] = std::current_exception();
        }
      });
    }
  }
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

class Stopwatch {
 public:
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
  }

 private:
  std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

}  // namespace bonalign::experiments
