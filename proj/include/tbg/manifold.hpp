#pragma once

#include <cmath>
#include <functional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "tbg/errors.hpp"
#include "tbg/linalg.hpp"
#include "tbg/smooth_map.hpp"

namespace tbg {

/// One coordinate chart of a Riemannian manifold. The metric field produces
/// the n(n+1)/2 independent components g_rs in sym_index order; the guard
/// excludes singular loci of the chart. sample_box bounds the region used by
/// randomized checks and must sit inside the guard.
struct ChartedManifold {
  int dim = 0;
  SmoothMap metric_field;
  std::function<bool(std::span<const double>)> domain_guard;
  std::string name;
  std::vector<std::pair<double, double>> sample_box;
};

inline void check_admissible(const ChartedManifold& man, std::span<const double> point) {
  if (static_cast<int>(point.size()) != man.dim)
    throw ConfigError(man.name + ": point dimension " + std::to_string(point.size()) +
                      " does not match chart dimension " + std::to_string(man.dim));
  if (man.domain_guard && !man.domain_guard(point))
    throw ConfigError(man.name + ": point " + format_point(point) +
                      " violates the chart domain guard");
}

/// Symmetric matrix of metric-component jets at the point.
inline Mat<Jet> metric_jets(const ChartedManifold& man, std::span<const double> point,
                            int order) {
  check_admissible(man, point);
  std::vector<Jet> packed = jet_eval(man.metric_field, point, order);
  return sym_unpack<Jet>(packed, man.dim);
}

inline Mat<double> metric_at(const ChartedManifold& man, std::span<const double> point) {
  Mat<double> g = values_of(metric_jets(man, point, 0));
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(to_eigen(g));
  const double lo = es.eigenvalues().minCoeff();
  if (lo <= 0.0)
    throw ConfigError(man.name + ": metric not positive definite at " + format_point(point) +
                      " (eigenvalue " + std::to_string(lo) + ")");
  return g;
}

inline Mat<double> metric_inverse_at(const ChartedManifold& man,
                                     std::span<const double> point) {
  return inverse(metric_at(man, point));
}

/// Levi-Civita coefficients as jets of the requested order (<= 2): the metric
/// is evaluated one order higher and the extra order is spent on the
/// derivative shift that produces the del-g terms.
inline Ten3<Jet> christoffel_jets(const ChartedManifold& man, std::span<const double> point,
                                  int order) {
  const int n = man.dim;
  Mat<Jet> g = metric_jets(man, point, order + 1);
  const Jet zero = Jet::constant(0.0, n, order + 1);
  const Jet one = Jet::constant(1.0, n, order + 1);
  Mat<Jet> ginv = inverse(g, zero, one);

  Ten3<Jet> gamma(n, n, n, Jet::constant(0.0, n, order));
  for (int s = 0; s < n; ++s)
    for (int t = s; t < n; ++t) {
      for (int r = 0; r < n; ++r) {
        Jet acc = Jet::constant(0.0, n, order);
        for (int l = 0; l < n; ++l) {
          Jet half_bracket =
              0.5 * (g(t, l).derivative(s) + g(s, l).derivative(t) - g(s, t).derivative(l));
          acc += ginv(r, l).truncated(order) * half_bracket;
        }
        gamma(r, s, t) = acc;
        gamma(r, t, s) = acc;
      }
    }
  return gamma;
}

/// Gamma^r_st values; first index upper, symmetric in the lower pair.
inline Ten3<double> christoffel(const ChartedManifold& man, std::span<const double> point) {
  Ten3<Jet> jets = christoffel_jets(man, point, 0);
  const int n = man.dim;
  Ten3<double> out(n, n, n);
  for (int r = 0; r < n; ++r)
    for (int s = 0; s < n; ++s)
      for (int t = 0; t < n; ++t) out(r, s, t) = jets(r, s, t).value();
  return out;
}

/// Sign convention for the curvature tensor. kPlus is the convention under
/// which round spheres of radius rho satisfy R_rstl = (1/rho^2)(g_rt g_sl -
/// g_rl g_st), i.e. R_theta,phi,theta,phi = sin^2(theta) on the unit 2-sphere.
enum class CurvatureSign { kPlus, kMinus };

struct CurvatureTensor {
  Ten4<double> components;  // R_rstl, all indices lowered
  CurvatureSign convention = CurvatureSign::kPlus;
};

inline CurvatureTensor riemann(const ChartedManifold& man, std::span<const double> point,
                               CurvatureSign convention = CurvatureSign::kPlus) {
  const int n = man.dim;
  Ten3<Jet> gamma = christoffel_jets(man, point, 1);
  Mat<double> g = values_of(metric_jets(man, point, 0));

  // Rup^m_stl = del_t Gamma^m_ls - del_l Gamma^m_ts
  //           + Gamma^m_tk Gamma^k_ls - Gamma^m_lk Gamma^k_ts
  Ten4<double> up(n, n, n, n);
  for (int m = 0; m < n; ++m)
    for (int s = 0; s < n; ++s)
      for (int t = 0; t < n; ++t)
        for (int l = 0; l < n; ++l) {
          double v = gamma(m, l, s).d1(t) - gamma(m, t, s).d1(l);
          for (int k = 0; k < n; ++k)
            v += gamma(m, t, k).value() * gamma(k, l, s).value() -
                 gamma(m, l, k).value() * gamma(k, t, s).value();
          up(m, s, t, l) = v;
        }

  const double sign = convention == CurvatureSign::kPlus ? 1.0 : -1.0;
  CurvatureTensor R;
  R.convention = convention;
  R.components = Ten4<double>(n, n, n, n);
  for (int r = 0; r < n; ++r)
    for (int s = 0; s < n; ++s)
      for (int t = 0; t < n; ++t)
        for (int l = 0; l < n; ++l) {
          double v = 0.0;
          for (int m = 0; m < n; ++m) v += g(r, m) * up(m, s, t, l);
          R.components(r, s, t, l) = sign * v;
        }
  return R;
}

/// Max-norm of R_rstl - c (g_rt g_sl - g_rl g_st), with the model tensor
/// oriented by the same convention flag so the residual is flag-invariant.
inline double constant_curvature_residual(const ChartedManifold& man,
                                          std::span<const double> point, double c,
                                          CurvatureSign convention = CurvatureSign::kPlus) {
  const int n = man.dim;
  CurvatureTensor R = riemann(man, point, convention);
  Mat<double> g = values_of(metric_jets(man, point, 0));
  const double sign = convention == CurvatureSign::kPlus ? 1.0 : -1.0;
  double worst = 0.0;
  for (int r = 0; r < n; ++r)
    for (int s = 0; s < n; ++s)
      for (int t = 0; t < n; ++t)
        for (int l = 0; l < n; ++l) {
          const double model = sign * c * (g(r, t) * g(s, l) - g(r, l) * g(s, t));
          worst = std::max(worst, std::abs(R.components(r, s, t, l) - model));
        }
  return worst;
}

/// Sectional curvature of the plane spanned by X and Y.
inline double sectional_curvature(const CurvatureTensor& R, const Mat<double>& g,
                                  std::span<const double> X, std::span<const double> Y) {
  const int n = g.rows();
  double num = 0.0;
  for (int r = 0; r < n; ++r)
    for (int s = 0; s < n; ++s)
      for (int t = 0; t < n; ++t)
        for (int l = 0; l < n; ++l) num += R.components(r, s, t, l) * X[r] * Y[s] * X[t] * Y[l];
  if (R.convention == CurvatureSign::kMinus) num = -num;

  double xx = 0.0, yy = 0.0, xy = 0.0;
  for (int r = 0; r < n; ++r)
    for (int s = 0; s < n; ++s) {
      xx += g(r, s) * X[r] * X[s];
      yy += g(r, s) * Y[r] * Y[s];
      xy += g(r, s) * X[r] * Y[s];
    }
  const double denom = xx * yy - xy * xy;
  if (std::abs(denom) < 1e-12)
    throw std::invalid_argument("sectional_curvature: degenerate plane");
  return num / denom;
}

}  // namespace tbg
