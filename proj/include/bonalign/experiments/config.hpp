#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

#include "bonalign/error.hpp"

namespace bonalign::experiments {

enum class Experiment {
  example1,
  ternary_figure,
  equivalence_scan,
  random_alphabet,
  closeness_bound,
  ldp_probe,
};

inline constexpr Experiment kAllExperiments[] = {
    Experiment::example1,        Experiment::ternary_figure,  Experiment::equivalence_scan,
    Experiment::random_alphabet, Experiment::closeness_bound, Experiment::ldp_probe,
};

/// Subcommand spelling.
constexpr std::string_view to_string(Experiment e) noexcept {
  switch (e) {
    case Experiment::example1: return "example1";
    case Experiment::ternary_figure: return "ternary-figure";
    case Experiment::equivalence_scan: return "equivalence-scan";
    case Experiment::random_alphabet: return "random-alphabet";
    case Experiment::closeness_bound: return "closeness-bound";
    case Experiment::ldp_probe: return "ldp-probe";
  }
  return "unknown";
}

/// Accepts the subcommand spelling or the underscore form.
inline std::optional<Experiment> parse_experiment(std::string_view name) {
  for (auto e : kAllExperiments) {
    std::string alt(to_string(e));
    for (auto& c : alt) c = c == '-' ? '_' : c;
    if (name == to_string(e) || name == alt) return e;
  }
  return std::nullopt;
}

/// Inputs shared by all experiments. Unset optionals and empty vectors take
/// the per-experiment defaults documented in the README.
struct ExperimentConfig {
  Experiment experiment = Experiment::example1;
  std::vector<double> p;
  std::vector<double> q;
  /// Alphabet sizes for random-alphabet.
  std::vector<std::uint64_t> K;
  std::optional<std::uint32_t> m;
  std::optional<std::uint64_t> N;
  std::optional<double> log_N;
  std::optional<double> delta;
  std::vector<double> deltas;
  std::vector<std::uint32_t> m_grid;
  std::vector<std::uint64_t> n_grid;
  std::vector<double> t_grid;
  std::optional<double> eps;
  std::optional<std::uint64_t> trials;
  std::optional<std::uint64_t> seeds;
  std::uint64_t seed = 0;
  unsigned workers = 1;
  /// ldp-probe: also sample best-of-N sequences of length bon_m.
  bool bon_probe = false;
  std::optional<std::uint32_t> bon_m;
  std::filesystem::path output_dir = "out";
};

namespace impl {

template <class T>
nlohmann::json optional_json(const std::optional<T>& v) {
  return v ? nlohmann::json(*v) : nlohmann::json(nullptr);
}

}  // namespace impl

/// Echo of every field except output_dir and workers, neither of which can
/// change a numeric result.
inline nlohmann::json to_json(const ExperimentConfig& c) {
  using impl::optional_json;
  nlohmann::json j;
  j["experiment"] = std::string(to_string(c.experiment));
  j["p"] = c.p;
  j["q"] = c.q;
  j["K"] = c.K;
  j["m"] = optional_json(c.m);
  j["N"] = optional_json(c.N);
  j["logN"] = optional_json(c.log_N);
  j["delta"] = optional_json(c.delta);
  j["deltas"] = c.deltas;
  j["m_grid"] = c.m_grid;
  j["n_grid"] = c.n_grid;
  j["t_grid"] = c.t_grid;
  j["eps"] = optional_json(c.eps);
  j["trials"] = optional_json(c.trials);
  j["seeds"] = optional_json(c.seeds);
  j["seed"] = c.seed;
  j["bon_probe"] = c.bon_probe;
  j["bon_m"] = optional_json(c.bon_m);
  return j;
}

}  // namespace bonalign::experiments
