#pragma once

// Ternary-simplex geometry around the aligned model: the KL ball boundary
// around p, the reward level line through phi_delta, the aligned family and
// the best-of-N expected type. Barycentric coordinates are the probabilities.

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <optional>
#include <vector>

#include "bonalign/best_of_n.hpp"
#include "bonalign/experiments/common.hpp"
#include "bonalign/experiments/report.hpp"
#include "bonalign/tilt.hpp"

namespace bonalign::experiments {

using Point3 = std::array<double, 3>;

inline constexpr int kContourDirections = 360;
inline constexpr double kRadialTolerance = 1e-10;
inline constexpr double kGeometryTolerance = 1e-8;
inline constexpr int kFamilyPoints = 201;
inline constexpr int kTradeoffPoints = 50;

namespace geometry {

/// D(v || p) for v on the closed simplex, with 0 log 0 = 0.
inline double kl_to_interior(const Point3& v, const Point3& p) {
  double acc = 0.0;
  for (std::size_t k = 0; k < 3; ++k) {
    if (v[k] > 0.0) acc += v[k] * std::log(v[k] / p[k]);
  }
  return std::max(acc, 0.0);
}

inline Point3 to_point(const Categorical& d) { return {d.prob(0), d.prob(1), d.prob(2)}; }

inline Point3 along(const Point3& origin, const Point3& dir, double r) {
  return {origin[0] + r * dir[0], origin[1] + r * dir[1], origin[2] + r * dir[2]};
}

inline double norm(const Point3& v) { return std::sqrt(v[0] * v[0] + v[1] * v[1] + v[2] * v[2]); }

inline Point3 minus(const Point3& a, const Point3& b) {
  return {a[0] - b[0], a[1] - b[1], a[2] - b[2]};
}

/// Unit direction in the plane sum(v) = 0 at angle theta.
inline Point3 plane_direction(double theta) {
  const double s2 = std::sqrt(2.0);
  const double s6 = std::sqrt(6.0);
  const double c = std::cos(theta);
  const double s = std::sin(theta);
  return {c / s2 + s / s6, -c / s2 + s / s6, -2.0 * s / s6};
}

struct RayHit {
  double radius = 0.0;
  /// The ray left the simplex before reaching the budget.
  bool clipped = false;
};

/// Radius where D(p + r dir || p) = delta. KL is increasing in r along the ray.
inline RayHit kl_ray_radius(const Point3& p, const Point3& dir, double delta) {
  double r_max = std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < 3; ++k) {
    if (dir[k] < 0.0) r_max = std::min(r_max, p[k] / -dir[k]);
  }
  if (kl_to_interior(along(p, dir, r_max), p) <= delta) return {r_max, true};
  double lo = 0.0;
  double hi = r_max;
  while (hi - lo > kRadialTolerance) {
    const double mid = 0.5 * (lo + hi);
    (kl_to_interior(along(p, dir, mid), p) < delta ? lo : hi) = mid;
  }
  return {0.5 * (lo + hi), false};
}

/// Endpoints of {w : sum_k w_k a_k = c} on the simplex boundary.
inline std::vector<Point3> level_line_endpoints(const Point3& a, double c) {
  std::vector<Point3> hits;
  auto add = [&](const Point3& w) {
    for (const auto& h : hits) {
      if (norm(minus(h, w)) < 1e-15) return;
    }
    hits.push_back(w);
  };
  for (std::size_t i = 0; i < 3; ++i) {
    for (std::size_t j = i + 1; j < 3; ++j) {
      if (a[i] == a[j]) continue;
      const double s = (c - a[j]) / (a[i] - a[j]);
      if (s < 0.0 || s > 1.0) continue;
      Point3 w{0.0, 0.0, 0.0};
      w[i] = s;
      w[j] = 1.0 - s;
      add(w);
    }
  }
  return hits;
}

/// Distance from x to the line through a and b, or to a when a == b.
inline double distance_to_line(const Point3& x, const Point3& a, const Point3& b) {
  const auto ab = minus(b, a);
  const auto ax = minus(x, a);
  const double len = norm(ab);
  if (len == 0.0) return norm(ax);
  const Point3 cross{ab[1] * ax[2] - ab[2] * ax[1], ab[2] * ax[0] - ab[0] * ax[2],
                     ab[0] * ax[1] - ab[1] * ax[0]};
  return norm(cross) / len;
}

}  // namespace geometry

/// Default candidate count round(exp(m delta)), at least 1.
inline std::uint64_t default_figure_n(std::uint32_t m, double delta) {
  return std::max<std::uint64_t>(1, static_cast<std::uint64_t>(std::llround(std::exp(m * delta))));
}

inline ExperimentReport run_ternary_figure(const ExperimentConfig& config) {
  using namespace geometry;
  const Stopwatch clock;
  ExperimentReport report;
  report.config = config;
  const auto p = config_p(config);
  const auto q = config_q(config);
  bonalign::detail::require(p.size() == 3 && q.size() == 3, ErrorCode::AlphabetMismatch,
                            "ternary-figure needs K = 3");
  const double delta = config.delta.value_or(0.11);
  const std::uint32_t m = config.m.value_or(10);
  const auto bon = config.N       ? BonConfig::count(*config.N)
                   : config.log_N ? BonConfig::log_count(*config.log_N)
                                  : BonConfig::count(default_figure_n(m, delta));

  const auto sol = solve_alpha_for_kl(q, p, delta);
  const auto pp = to_point(p);
  const auto phi = to_point(sol.phi);
  const Point3 reward{-q.log_prob(0), -q.log_prob(1), -q.log_prob(2)};
  const double level = cross_entropy(sol.phi, q);

  const std::vector<std::string> header{"x_bary1", "x_bary2", "x_bary3", "curve_tag"};
  auto add_point = [](CsvTable& t, const Point3& v, const char* tag) {
    t.add_row({v[0], v[1], v[2], tag});
  };

  CsvTable kl_csv{"ternary_kl_contour.csv", header, {}};
  int clipped = 0;
  for (int i = 0; i <= kContourDirections; ++i) {
    const double theta = 2.0 * std::numbers::pi * (i % kContourDirections) / kContourDirections;
    const auto dir = plane_direction(theta);
    const auto hit = kl_ray_radius(pp, dir, delta);
    if (i < kContourDirections && hit.clipped) ++clipped;
    add_point(kl_csv, along(pp, dir, hit.radius), "kl_contour");
  }

  CsvTable reward_csv{"ternary_reward_contour.csv", header, {}};
  const auto ends = level_line_endpoints(reward, level);
  for (const auto& w : ends) add_point(reward_csv, w, "reward_contour");

  CsvTable family_csv{"ternary_aligned_family.csv", header, {}};
  const double alpha_hi = std::max(10.0, 4.0 * sol.alpha);
  for (int i = 0; i < kFamilyPoints; ++i) {
    const double a = alpha_hi * i / (kFamilyPoints - 1);
    add_point(family_csv, to_point(mismatched_tilt(q, p, a)), "aligned_family");
  }

  // Reward against budget along the family; default grid spans [0, 0.9 max_kl].
  std::vector<double> deltas = config.deltas;
  if (deltas.empty()) {
    const double hi = 0.9 * max_achievable_kl(q, p);
    for (int i = 0; i <= kTradeoffPoints; ++i) deltas.push_back(hi * i / kTradeoffPoints);
  }
  CsvTable tradeoff_csv{"ternary_tradeoff.csv", {"delta", "alpha", "expected_reward"}, {}};
  for (const auto& pt : tradeoff_curve(q, p, deltas)) {
    tradeoff_csv.add_row({pt.delta, pt.alpha, pt.expected_reward});
  }

  const auto law = bon_type_law(p, q, m, bon);
  const auto et = bon_expected_type(law);
  const Point3 etp{et[0], et[1], et[2]};
  CsvTable points_csv{"ternary_points.csv", header, {}};
  add_point(points_csv, phi, "phi");
  add_point(points_csv, etp, "best_of_n_expected_type");
  add_point(points_csv, pp, "p");
  add_point(points_csv, to_point(q), "q");

  // phi on the KL contour: budget residual, and traced radius on its own ray.
  report.check_le("phi_kl_residual", std::abs(kl_to_interior(phi, pp) - delta),
                  kGeometryTolerance);
  const auto offset = minus(phi, pp);
  const double r_phi = norm(offset);
  double radial_gap = r_phi;
  if (r_phi > 0.0) {
    const Point3 dir{offset[0] / r_phi, offset[1] / r_phi, offset[2] / r_phi};
    radial_gap = std::abs(kl_ray_radius(pp, dir, delta).radius - r_phi);
  }
  report.check_le("phi_contour_radial_gap", radial_gap, kGeometryTolerance);

  // phi on its reward level line.
  double endpoint_residual = 0.0;
  for (const auto& w : ends) {
    endpoint_residual = std::max(
        endpoint_residual, std::abs(w[0] * reward[0] + w[1] * reward[1] + w[2] * reward[2] - level));
  }
  const double line_gap = ends.empty() ? 0.0
                          : ends.size() == 1 ? distance_to_line(phi, ends[0], ends[0])
                                             : distance_to_line(phi, ends.front(), ends.back());
  report.check_le("reward_endpoint_residual", endpoint_residual, kGeometryTolerance);
  report.check_le("phi_reward_line_distance", line_gap, kGeometryTolerance);

  const double l1_bon = l1_distance(et, sol.phi.probs());
  const double l1_ref = l1_distance(p.probs(), sol.phi.probs());
  if (delta > 0.0) {
    report.check_flag("bon_type_closer_than_p", l1_bon < l1_ref);
  }

  report.results["alpha"] = sol.alpha;
  report.results["phi"] = sol.phi.probs();
  report.results["phi_cross_entropy"] = level;
  report.results["achieved_kl"] = sol.achieved_kl;
  report.results["m"] = m;
  report.results["log_N"] = bon.log_n();
  report.results["bon_expected_type"] = et;
  report.results["l1_bon_type_to_phi"] = l1_bon;
  report.results["l1_p_to_phi"] = l1_ref;
  report.results["kl_contour_clipped_directions"] = clipped;
  report.results["reward_contour_endpoints"] = ends.size();

  report.tables.push_back(std::move(kl_csv));
  report.tables.push_back(std::move(reward_csv));
  report.tables.push_back(std::move(family_csv));
  report.tables.push_back(std::move(points_csv));
  report.tables.push_back(std::move(tradeoff_csv));
  report.wall_clock_seconds = clock.seconds();
  return report;
}

}  // namespace bonalign::experiments
