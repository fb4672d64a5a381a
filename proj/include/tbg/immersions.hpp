#pragma once

#include <cmath>
#include <numbers>
#include <string>
#include <vector>

#include "tbg/spaces.hpp"
#include "tbg/submanifold.hpp"

namespace tbg {

/// Equator S^(n-1) inside S^n of the same radius: prepend the polar angle
/// pi/2, where the enclosing chart's warping factor is 1.
inline ImmersionData equator_immersion(int target_n, double rho) {
  if (target_n < 2) throw ConfigError("equator_immersion: target sphere dimension must be >= 2");
  const int m = target_n - 1;
  SmoothMap map(m, target_n, [m](std::span<const Jet> in) {
    std::vector<Jet> out;
    out.reserve(static_cast<size_t>(m + 1));
    out.push_back(Jet::constant(std::numbers::pi / 2, in[0].nvars(), in[0].order()));
    for (int a = 0; a < m; ++a) out.push_back(in[static_cast<size_t>(a)]);
    return out;
  });
  return make_immersion(round_sphere(m, rho), round_sphere(target_n, rho), map,
                        "equator-s" + std::to_string(m) + "-in-s" + std::to_string(target_n));
}

/// Latitude circle theta = theta0 on the unit 2-sphere; its induced metric is
/// the round circle of radius sin(theta0), which is what the source declares.
inline ImmersionData small_circle_immersion(double theta0) {
  if (theta0 <= 0.15 || theta0 >= std::numbers::pi - 0.15)
    throw ConfigError("small_circle_immersion: latitude too close to a chart pole");
  SmoothMap map(1, 2, [theta0](std::span<const Jet> in) {
    return std::vector<Jet>{Jet::constant(theta0, in[0].nvars(), in[0].order()), in[0]};
  });
  return make_immersion(round_sphere(1, std::sin(theta0)), round_sphere(2, 1.0), map,
                        "small-circle(" + std::to_string(theta0) + ")");
}

/// y -> (y, 0, ..., 0) between Euclidean spaces.
inline ImmersionData linear_subspace_immersion(int m, int n) {
  if (m >= n) throw ConfigError("linear_subspace_immersion: need m < n");
  SmoothMap map(m, n, [m, n](std::span<const Jet> in) {
    std::vector<Jet> out;
    out.reserve(static_cast<size_t>(n));
    for (int a = 0; a < m; ++a) out.push_back(in[static_cast<size_t>(a)]);
    for (int r = m; r < n; ++r) out.push_back(Jet::constant(0.0, in[0].nvars(), in[0].order()));
    return out;
  });
  return make_immersion(euclidean_space(m), euclidean_space(n), map,
                        "linear-" + std::to_string(m) + "-in-r" + std::to_string(n));
}

/// Flat sheet (y1, y2) -> (y1, y2, 0) in R^3.
inline ImmersionData plane_in_r3_immersion() { return linear_subspace_immersion(2, 3); }

/// Saddle graph (y1, y2) -> (y1, y2, y1 y2) in R^3. Its source chart carries
/// the pulled-back metric delta_ab + w_a w_b with w = (y2, y1), so the
/// immersion is isometric while del B is genuinely nonzero.
inline ImmersionData saddle_graph_immersion() {
  ChartedManifold sheet;
  sheet.dim = 2;
  sheet.name = "saddle-sheet";
  sheet.metric_field = SmoothMap(2, 3, [](std::span<const Jet> in) {
    const Jet& y1 = in[0];
    const Jet& y2 = in[1];
    return std::vector<Jet>{1.0 + y2 * y2, y1 * y2, 1.0 + y1 * y1};
  });
  sheet.domain_guard = [](std::span<const double>) { return true; };
  sheet.sample_box = {{-1.5, 1.5}, {-1.5, 1.5}};

  SmoothMap map(2, 3, [](std::span<const Jet> in) {
    return std::vector<Jet>{in[0], in[1], in[0] * in[1]};
  });
  return make_immersion(sheet, euclidean_space(3), map, "saddle-graph");
}

/// Axis line y -> (y, phi0) inside the warped product dt^2 + f(t)^2 dphi^2;
/// totally geodesic for any warp, and the ambient curvature is non-constant
/// unless the warp makes it so.
inline ImmersionData warped_axis_immersion(std::function<Jet(const Jet&)> warp, std::string name,
                                           double phi0 = 0.0) {
  SmoothMap map(1, 2, [phi0](std::span<const Jet> in) {
    return std::vector<Jet>{in[0], Jet::constant(phi0, in[0].nvars(), in[0].order())};
  });
  return make_immersion(euclidean_space(1), warped_product(1, std::move(warp), std::move(name)),
                        map, "warped-axis");
}

}  // namespace tbg
