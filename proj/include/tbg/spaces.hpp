#pragma once

#include <cmath>
#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "tbg/manifold.hpp"
#include "tbg/rng.hpp"

namespace tbg {

inline ChartedManifold euclidean_space(int n) {
  ChartedManifold man;
  man.dim = n;
  man.name = "euclidean" + std::to_string(n);
  man.metric_field = SmoothMap(n, sym_count(n), [n](std::span<const Jet> in) {
    std::vector<Jet> packed;
    packed.reserve(static_cast<size_t>(sym_count(n)));
    for (int i = 0; i < n; ++i)
      for (int j = i; j < n; ++j)
        packed.push_back(Jet::constant(i == j ? 1.0 : 0.0, in[0].nvars(), in[0].order()));
    return packed;
  });
  man.domain_guard = [](std::span<const double>) { return true; };
  man.sample_box.assign(static_cast<size_t>(n), {-2.0, 2.0});
  return man;
}

/// Round sphere S^n of radius rho in polar coordinates, n <= 3. Polar angles
/// keep a 0.1 margin away from the chart poles.
inline ChartedManifold round_sphere(int n, double rho) {
  if (n < 1 || n > 3) throw ConfigError("round_sphere: dimension must be 1..3");
  if (rho <= 0.0) throw ConfigError("round_sphere: radius must be positive");
  constexpr double kMargin = 0.1;
  const double pi = 3.14159265358979323846;

  ChartedManifold man;
  man.dim = n;
  man.name = "sphere" + std::to_string(n) + "(" + std::to_string(rho) + ")";
  man.metric_field = SmoothMap(n, sym_count(n), [n, rho](std::span<const Jet> in) {
    // diag(rho^2, rho^2 sin^2 x0, rho^2 sin^2 x0 sin^2 x1, ...)
    std::vector<Jet> diag;
    diag.reserve(static_cast<size_t>(n));
    Jet running = Jet::constant(rho * rho, in[0].nvars(), in[0].order());
    diag.push_back(running);
    for (int i = 1; i < n; ++i) {
      Jet s = sin(in[static_cast<size_t>(i - 1)]);
      running = running * s * s;
      diag.push_back(running);
    }
    std::vector<Jet> packed;
    packed.reserve(static_cast<size_t>(sym_count(n)));
    for (int i = 0; i < n; ++i)
      for (int j = i; j < n; ++j)
        packed.push_back(i == j ? diag[static_cast<size_t>(i)]
                                : Jet::constant(0.0, in[0].nvars(), in[0].order()));
    return packed;
  });
  man.domain_guard = [n, kMargin, pi](std::span<const double> p) {
    for (int i = 0; i + 1 < n; ++i)
      if (p[static_cast<size_t>(i)] < kMargin || p[static_cast<size_t>(i)] > pi - kMargin)
        return false;
    return true;
  };
  for (int i = 0; i + 1 < n; ++i) man.sample_box.push_back({0.3, pi - 0.3});
  man.sample_box.push_back({0.1, 6.0});
  return man;
}

/// dt^2 + f(t)^2 dsigma^2 with a flat fiber of the given dimension.
inline ChartedManifold warped_product(int fiber_dim, std::function<Jet(const Jet&)> warp,
                                      std::string name,
                                      std::pair<double, double> t_range = {-1.5, 1.5}) {
  if (fiber_dim < 1) throw ConfigError("warped_product: fiber dimension must be positive");
  const int n = fiber_dim + 1;

  ChartedManifold man;
  man.dim = n;
  man.name = std::move(name);
  man.metric_field = SmoothMap(n, sym_count(n), [n, warp](std::span<const Jet> in) {
    Jet f = warp(in[0]);
    Jet f2 = f * f;
    std::vector<Jet> packed;
    packed.reserve(static_cast<size_t>(sym_count(n)));
    for (int i = 0; i < n; ++i)
      for (int j = i; j < n; ++j) {
        if (i != j)
          packed.push_back(Jet::constant(0.0, in[0].nvars(), in[0].order()));
        else
          packed.push_back(i == 0 ? Jet::constant(1.0, in[0].nvars(), in[0].order()) : f2);
      }
    return packed;
  });
  man.domain_guard = [warp](std::span<const double> p) {
    Jet t = Jet::constant(p[0], 1, 0);
    return std::abs(warp(t).value()) > 1e-8;
  };
  man.sample_box.push_back(t_range);
  for (int i = 0; i < fiber_dim; ++i) man.sample_box.push_back({-3.0, 3.0});
  return man;
}

/// Curvature -1 model: dt^2 + cosh^2(t) dphi^2.
inline ChartedManifold hyperbolic_plane() {
  return warped_product(1, [](const Jet& t) { return cosh(t); }, "hyperbolic-plane");
}

/// Flat metric with a smooth perturbation, g_rs = delta_rs + eps sin(x^r + x^s);
/// stays positive definite for n * eps < 1. Used as a negative test bed.
inline ChartedManifold perturbed_flat(int n, double eps) {
  ChartedManifold man;
  man.dim = n;
  man.name = "perturbed-flat" + std::to_string(n) + "(" + std::to_string(eps) + ")";
  man.metric_field = SmoothMap(n, sym_count(n), [n, eps](std::span<const Jet> in) {
    std::vector<Jet> packed;
    packed.reserve(static_cast<size_t>(sym_count(n)));
    for (int i = 0; i < n; ++i)
      for (int j = i; j < n; ++j) {
        Jet entry = eps * sin(in[static_cast<size_t>(i)] + in[static_cast<size_t>(j)]);
        if (i == j) entry += 1.0;
        packed.push_back(entry);
      }
    return packed;
  });
  man.domain_guard = [](std::span<const double>) { return true; };
  man.sample_box.assign(static_cast<size_t>(n), {-2.0, 2.0});
  return man;
}

/// Uniform draw from the manifold's sample box.
inline std::vector<double> sample_point(const ChartedManifold& man, Rng& rng) {
  std::vector<double> p(static_cast<size_t>(man.dim));
  for (int i = 0; i < man.dim; ++i) {
    const auto& [lo, hi] = man.sample_box[static_cast<size_t>(i)];
    p[static_cast<size_t>(i)] = rng.uniform(lo, hi);
  }
  return p;
}

}  // namespace tbg
