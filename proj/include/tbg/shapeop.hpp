#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "tbg/tangentlift.hpp"

namespace tbg {

/// Levi-Civita symbols GammaTilde^r_st of (TN, G) in the natural chart,
/// assembled from order-1 jets of the bundle metric. The first index is
/// upper; raising goes through a linear solve, so an indefinite G is fine.
inline Ten3<double> tn_christoffel(const GNaturalGenerators& gen, const ChartedManifold& man,
                                   std::span<const double> x, std::span<const double> u) {
  (void)metric_natural_at(gen, man, x, u);  // degeneracy and guard checks
  const int d = 2 * man.dim;
  std::vector<double> w(x.begin(), x.end());
  w.insert(w.end(), u.begin(), u.end());
  std::vector<Jet> packed = jet_eval(metric_natural(gen, man), w, 1);

  Mat<double> G(d, d);
  Ten3<double> dG(d, d, d);  // dG(k, i, j) = del_k G_ij
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) {
      const Jet& entry = packed[static_cast<size_t>(sym_index(i, j, d))];
      G(i, j) = entry.value();
      for (int k = 0; k < d; ++k) dG(k, i, j) = entry.d1(k);
    }

  Mat<double> bracket(d, d * d);
  for (int s = 0; s < d; ++s)
    for (int t = 0; t < d; ++t)
      for (int l = 0; l < d; ++l)
        bracket(l, s * d + t) = 0.5 * (dG(s, t, l) + dG(t, s, l) - dG(l, s, t));

  Mat<double> raised(d, d * d);
  try {
    raised = solve(G, bracket);
  } catch (const std::domain_error&) {
    throw std::domain_error("bundle metric is singular at " + format_point(w));
  }
  Ten3<double> gamma(d, d, d);
  for (int r = 0; r < d; ++r)
    for (int s = 0; s < d; ++s)
      for (int t = 0; t < d; ++t) gamma(r, s, t) = raised(r, s * d + t);
  return gamma;
}

/// All 2m lifted coordinate frame columns of LM as one map of (y, v), so the
/// frame can be differentiated through the lift by the chain rule. Output is
/// column-major: entry c * 2n + i is component i of column c. Columns 0..m-1
/// are the d/dy^a fields, columns m..2m-1 the d/dv^a fields. Differentiable
/// once (the immersion map supplies jets up to order 3).
inline SmoothMap lm_frame_field(const ImmersionData& imm) {
  const int m = imm.source.dim;
  const int n = imm.target.dim;
  SmoothMap base = imm.map;
  auto ev = [m, n, base](std::span<const Jet> in) {
    const int q = in[0].order();
    std::vector<double> y0(static_cast<size_t>(m));
    for (int a = 0; a < m; ++a) y0[static_cast<size_t>(a)] = in[a].value();
    std::vector<Jet> x_high = jet_eval(base, y0, q + 2);
    std::span<const Jet> y_in = in.subspan(0, static_cast<size_t>(m));

    const Jet zero = Jet::constant(0.0, in[0].nvars(), q);
    std::vector<Jet> out(static_cast<size_t>(4 * m * n), zero);
    const int dn = 2 * n;
    for (int a = 0; a < m; ++a)
      for (int r = 0; r < n; ++r) {
        Jet B = compose(x_high[static_cast<size_t>(r)].derivative(a), y_in);
        out[static_cast<size_t>(a * dn + r)] = B;
        out[static_cast<size_t>((m + a) * dn + n + r)] = B;
        Jet acc = zero;
        for (int b = 0; b < m; ++b)
          acc += in[m + b] *
                 compose(x_high[static_cast<size_t>(r)].derivative(a).derivative(b), y_in);
        out[static_cast<size_t>(a * dn + n + r)] = acc;
      }
    return out;
  };
  return SmoothMap(2 * m, 4 * m * n, std::move(ev), 1);
}

/// Second fundamental form data of LM inside (TN, G) at one lifted point.
/// derivative(i,j,:) is the full ambient covariant derivative of frame
/// column j along column i; scalar(i,j,x) = G(derivative(i,j), N_x).
struct LMSecondFundamentalReport {
  LiftedPoint point;
  LMFrameBundle frame;
  Ten3<double> derivative;  // (2m, 2m, 2n)
  Ten3<double> scalar;      // (2m, 2m, 2k)
  double symmetry = 0.0;       // max |scalar(i,j,x) - scalar(j,i,x)|
  double recombination = 0.0;  // Gauss split: |tangential + normal - derivative|
  double max_component = 0.0;  // max |scalar|
};

inline LMSecondFundamentalReport second_fundamental_form_LM(const GNaturalGenerators& gen,
                                                            const ImmersionData& imm,
                                                            const LiftedPoint& p) {
  const int m = imm.source.dim;
  const int n = imm.target.dim;
  const int dm = 2 * m, dn = 2 * n;

  LMSecondFundamentalReport rep;
  rep.point = p;
  rep.frame = normal_space_LM(gen, imm, p);
  const Mat<double>& T = rep.frame.tangent;
  const Mat<double>& N = rep.frame.normals;
  const Mat<double>& G = rep.frame.G;
  const int k2 = N.cols();

  Ten3<double> gamma = tn_christoffel(gen, imm.target, p.x, p.u);
  std::vector<Jet> ff = jet_eval(lm_frame_field(imm), source_coords(p), 1);

  rep.derivative = Ten3<double>(dm, dm, dn);
  for (int i = 0; i < dm; ++i)
    for (int j = 0; j < dm; ++j)
      for (int r = 0; r < dn; ++r) {
        double val = ff[static_cast<size_t>(j * dn + r)].d1(i);
        for (int s = 0; s < dn; ++s) {
          double contract = 0.0;
          for (int t = 0; t < dn; ++t) contract += gamma(r, s, t) * T(t, j);
          val += contract * T(s, i);
        }
        rep.derivative(i, j, r) = val;
      }

  rep.scalar = Ten3<double>(dm, dm, k2);
  for (int i = 0; i < dm; ++i)
    for (int j = 0; j < dm; ++j)
      for (int x = 0; x < k2; ++x) {
        double acc = 0.0;
        for (int r = 0; r < dn; ++r) {
          double Gn = 0.0;
          for (int s = 0; s < dn; ++s) Gn += G(r, s) * N(s, x);
          acc += rep.derivative(i, j, r) * Gn;
        }
        rep.scalar(i, j, x) = acc;
        rep.max_component = std::max(rep.max_component, std::abs(acc));
      }
  for (int i = 0; i < dm; ++i)
    for (int j = i + 1; j < dm; ++j)
      for (int x = 0; x < k2; ++x)
        rep.symmetry =
            std::max(rep.symmetry, std::abs(rep.scalar(i, j, x) - rep.scalar(j, i, x)));

  // Gauss split: project onto the tangent and normal frames through their
  // Gram systems and require the parts to re-sum to the full derivative.
  Mat<double> D(dn, dm * dm);
  for (int i = 0; i < dm; ++i)
    for (int j = 0; j < dm; ++j)
      for (int r = 0; r < dn; ++r) D(r, i * dm + j) = rep.derivative(i, j, r);
  Mat<double> GD = G * D;
  Mat<double> tan_coeff = solve(T.transposed() * G * T, T.transposed() * GD);
  Mat<double> nor_coeff = solve(rep.frame.gram, N.transposed() * GD);
  Mat<double> resum = T * tan_coeff + N * nor_coeff;
  for (int r = 0; r < dn; ++r)
    for (int c = 0; c < dm * dm; ++c)
      rep.recombination = std::max(rep.recombination, std::abs(resum(r, c) - D(r, c)));
  return rep;
}

/// One entry of the closed-form component table: the shape-operator pairing
/// -G(A_{xi}(slot_x lift of delta_a), slot_y lift of delta_b) against the
/// curvature expression it should equal.
struct ClosedFormRow {
  char xi;      // which lift of eta feeds the shape operator: 'h' or 'v'
  char slot_x;  // lift of delta_a
  char slot_y;  // lift of delta_b
  int a = 0, b = 0;
  double lhs = 0.0, rhs = 0.0;
};

struct ClosedFormReport {
  std::vector<ClosedFormRow> rows;
  double max_residual = 0.0;
  double max_lhs = 0.0;  // both-sides-zero evidence, not just residual-zero
  double max_rhs = 0.0;
};

/// Evaluates the displayed component identities of the lifted shape operator
/// for one normal field eta of M. Requires M totally geodesic at the base
/// point: the derivation drops the induced-connection terms on that
/// hypothesis, and without it the lifted frame is not normal-adapted.
inline ClosedFormReport closed_form_components(const GNaturalGenerators& gen,
                                               const ImmersionData& imm, const LiftedPoint& p,
                                               std::span<const double> eta) {
  const int m = imm.source.dim;
  const int n = imm.target.dim;
  if (static_cast<int>(eta.size()) != n)
    throw std::invalid_argument(imm.name + ": eta must have " + std::to_string(n) +
                                " components");

  SecondFundamentalForm hM = second_fundamental_form(imm, p.y);
  double base_h = 0.0;
  for (int a = 0; a < m; ++a)
    for (int b = 0; b < m; ++b)
      for (int x = 0; x < n - m; ++x)
        base_h = std::max(base_h, std::abs(hM.scalar(a, b, x)));
  if (base_h > 1e-8)
    throw std::domain_error(imm.name + ": closed-form components assume a totally geodesic " +
                            "base (|h| = " + std::to_string(base_h) + " at " +
                            format_point(p.y) + ")");

  LMSecondFundamentalReport rep = second_fundamental_form_LM(gen, imm, p);
  LiftedVectors xi = lift_vectors_TN(imm.target, p.x, p.u, eta);
  ImmersionJets ij = immersion_jets(imm, p.y);
  CurvatureTensor R = riemann(imm.target, p.x);
  Mat<double> g = metric_at(imm.target, p.x);

  double t = 0.0;
  for (int r = 0; r < n; ++r)
    for (int s = 0; s < n; ++s) t += g(r, s) * p.u[static_cast<size_t>(r)] * p.u[static_cast<size_t>(s)];
  GNaturalScalars sc = scalars_at(gen, t);

  auto curv = [&](std::span<const double> w, std::span<const double> xx,
                  std::span<const double> yy, std::span<const double> zz) {
    double acc = 0.0;
    for (int r = 0; r < n; ++r)
      for (int s = 0; s < n; ++s)
        for (int t2 = 0; t2 < n; ++t2)
          for (int l = 0; l < n; ++l)
            acc += R.components(r, s, t2, l) * w[static_cast<size_t>(r)] *
                   xx[static_cast<size_t>(s)] * yy[static_cast<size_t>(t2)] *
                   zz[static_cast<size_t>(l)];
    return acc;
  };
  auto lhs_of = [&](int i, int j, const std::vector<double>& xiv) {
    double acc = 0.0;
    for (int r = 0; r < 2 * n; ++r)
      for (int s = 0; s < 2 * n; ++s)
        acc += rep.derivative(i, j, r) * rep.frame.G(r, s) * xiv[static_cast<size_t>(s)];
    return -acc;
  };

  ClosedFormReport out;
  for (int a = 0; a < m; ++a)
    for (int b = 0; b < m; ++b) {
      std::vector<double> Ba(static_cast<size_t>(n)), Bb(static_cast<size_t>(n));
      for (int r = 0; r < n; ++r) {
        Ba[static_cast<size_t>(r)] = ij.B(a, r);
        Bb[static_cast<size_t>(r)] = ij.B(b, r);
      }
      const std::vector<double>& u = p.u;
      out.rows.push_back({'h', 'h', 'h', a, b, lhs_of(a, b, xi.h),
                          sc.a2 * curv(u, Ba, eta, Bb)});
      out.rows.push_back({'h', 'h', 'v', a, b, lhs_of(a, m + b, xi.h),
                          0.5 * sc.a1 * curv(u, Ba, eta, Bb)});
      out.rows.push_back({'h', 'v', 'h', a, b, lhs_of(m + a, b, xi.h),
                          0.5 * sc.a1 * curv(u, Bb, eta, Ba)});
      out.rows.push_back({'h', 'v', 'v', a, b, lhs_of(m + a, m + b, xi.h), 0.0});
      out.rows.push_back({'v', 'h', 'h', a, b, lhs_of(a, b, xi.v),
                          0.5 * sc.a1 * curv(u, eta, Ba, Bb)});
      out.rows.push_back({'v', 'h', 'v', a, b, lhs_of(a, m + b, xi.v), 0.0});
      out.rows.push_back({'v', 'v', 'h', a, b, lhs_of(m + a, b, xi.v), 0.0});
      out.rows.push_back({'v', 'v', 'v', a, b, lhs_of(m + a, m + b, xi.v), 0.0});
    }
  for (const ClosedFormRow& row : out.rows) {
    out.max_residual = std::max(out.max_residual, std::abs(row.lhs - row.rhs));
    out.max_lhs = std::max(out.max_lhs, std::abs(row.lhs));
    out.max_rhs = std::max(out.max_rhs, std::abs(row.rhs));
  }
  return out;
}

/// Component table for every g-orthonormal normal field of M at the point.
inline std::vector<ClosedFormReport> closed_form_report(const GNaturalGenerators& gen,
                                                        const ImmersionData& imm,
                                                        const LiftedPoint& p) {
  NormalFrame nf = normal_frame(imm, p.y);
  std::vector<ClosedFormReport> out;
  for (int x = 0; x < nf.vectors.cols(); ++x) {
    std::vector<double> eta(static_cast<size_t>(imm.target.dim));
    for (int r = 0; r < imm.target.dim; ++r) eta[static_cast<size_t>(r)] = nf.vectors(r, x);
    out.push_back(closed_form_components(gen, imm, p, eta));
  }
  return out;
}

struct TheoremGrid {
  int points = 30;
  double fiber_bound = 2.0;  // cap on the g-norm of sampled fiber vectors
  std::uint64_t seed = 0x5eedULL;
};

/// Hypotheses and conclusion of the totally-geodesic lift theorem, each
/// evaluated rather than assumed. A scenario where the hypotheses fail is
/// reported with the implication vacuously satisfied, not as a failure.
struct TheoremVerdict {
  bool base_totally_geodesic = false;     // (i)  M totally geodesic in N
  bool ambient_constant_curvature = false;  // (ii) N has constant curvature
  bool lift_totally_geodesic = false;     // (iii) LM totally geodesic in (TN, G)
  bool implication_holds = false;         // (i) and (ii) together force (iii)
  double fitted_c = 0.0;
  double curvature_residual = 0.0;
  double base_h_max = 0.0;
  double lift_component_max = 0.0;
  double tol = 0.0;
};

inline TheoremVerdict theorem_check(const GNaturalGenerators& gen, const ImmersionData& imm,
                                    const TheoremGrid& grid, double tol) {
  if (grid.points < 1) throw ConfigError(imm.name + ": theorem grid needs at least one point");
  const int m = imm.source.dim;
  Rng rng(grid.seed);

  std::vector<std::vector<double>> ys;
  std::vector<LiftedPoint> pts;
  for (int i = 0; i < grid.points; ++i) {
    std::vector<double> y = sample_point(imm.source, rng);
    std::vector<double> v(static_cast<size_t>(m));
    for (double& c : v) c = rng.uniform(-grid.fiber_bound, grid.fiber_bound);
    Mat<double> gi = induced_metric(imm, y);
    double nv = 0.0;
    for (int a = 0; a < m; ++a)
      for (int b = 0; b < m; ++b) nv += gi(a, b) * v[static_cast<size_t>(a)] * v[static_cast<size_t>(b)];
    nv = std::sqrt(std::max(nv, 0.0));
    if (nv > grid.fiber_bound)
      for (double& c : v) c *= 0.95 * grid.fiber_bound / nv;
    ys.push_back(std::move(y));
    pts.push_back(lifted_point(imm, ys.back(), v));
  }

  TheoremVerdict out;
  out.tol = tol;
  GeodesicVerdict gv = is_totally_geodesic(imm, ys, tol);
  out.base_totally_geodesic = gv.totally_geodesic;
  out.base_h_max = gv.max_residual;

  // best constant-curvature model over the sampled target points
  double num = 0.0, den = 0.0;
  for (const LiftedPoint& p : pts) {
    CurvatureTensor R = riemann(imm.target, p.x);
    Mat<double> g = metric_at(imm.target, p.x);
    const int n = imm.target.dim;
    for (int r = 0; r < n; ++r)
      for (int s = 0; s < n; ++s)
        for (int t = 0; t < n; ++t)
          for (int l = 0; l < n; ++l) {
            const double model = g(r, t) * g(s, l) - g(r, l) * g(s, t);
            num += R.components(r, s, t, l) * model;
            den += model * model;
          }
  }
  out.fitted_c = den > 0.0 ? num / den : 0.0;
  for (const LiftedPoint& p : pts)
    out.curvature_residual =
        std::max(out.curvature_residual, constant_curvature_residual(imm.target, p.x, out.fitted_c));
  out.ambient_constant_curvature = out.curvature_residual <= tol;

  for (const LiftedPoint& p : pts)
    out.lift_component_max =
        std::max(out.lift_component_max, second_fundamental_form_LM(gen, imm, p).max_component);
  out.lift_totally_geodesic = out.lift_component_max <= tol;

  out.implication_holds =
      !(out.base_totally_geodesic && out.ambient_constant_curvature) || out.lift_totally_geodesic;
  return out;
}

}  // namespace tbg
