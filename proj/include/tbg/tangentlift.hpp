#pragma once

#include <cmath>
#include <span>
#include <string>
#include <vector>

#include "tbg/gnatural.hpp"
#include "tbg/submanifold.hpp"

namespace tbg {

/// A point of the lifted submanifold: source bundle coordinates (y, v)
/// together with their image (x, u), where u^r = v^a B_a^r exactly.
struct LiftedPoint {
  std::vector<double> y, v;
  std::vector<double> x, u;
};

inline LiftedPoint lifted_point(const ImmersionData& imm, std::span<const double> y,
                                std::span<const double> v) {
  const int m = imm.source.dim, n = imm.target.dim;
  if (static_cast<int>(v.size()) != m)
    throw std::invalid_argument(imm.name + ": fiber vector needs " + std::to_string(m) +
                                " components");
  ImmersionJets ij = immersion_jets(imm, y);
  LiftedPoint p;
  p.y.assign(y.begin(), y.end());
  p.v.assign(v.begin(), v.end());
  p.x = ij.x;
  p.u.assign(static_cast<size_t>(n), 0.0);
  for (int r = 0; r < n; ++r)
    for (int a = 0; a < m; ++a) p.u[static_cast<size_t>(r)] += v[a] * ij.B(a, r);
  return p;
}

/// (y, v) and (x, u) pairs flattened to single chart points of the bundles.
inline std::vector<double> source_coords(const LiftedPoint& p) {
  std::vector<double> w(p.y);
  w.insert(w.end(), p.v.begin(), p.v.end());
  return w;
}

inline std::vector<double> target_coords(const LiftedPoint& p) {
  std::vector<double> z(p.x);
  z.insert(z.end(), p.u.begin(), p.u.end());
  return z;
}

/// Lift of an immersion between the tangent bundles, (y, v) -> (x(y), v^a B_a^r).
/// The fiber output spends one derivative of x beyond the requested jet order,
/// so pointwise Taylor data one order higher is chained back onto the inputs;
/// that caps the lifted map at order 2.
inline SmoothMap lift_immersion(const ImmersionData& imm) {
  const int m = imm.source.dim, n = imm.target.dim;
  SmoothMap base = imm.map;
  auto ev = [base, m, n](std::span<const Jet> in) {
    const int q = in[0].order();
    auto y_in = in.first(static_cast<size_t>(m));
    auto v_in = in.subspan(static_cast<size_t>(m));
    std::vector<double> y0(static_cast<size_t>(m));
    for (int a = 0; a < m; ++a) y0[static_cast<size_t>(a)] = y_in[a].value();
    std::vector<Jet> x_high = jet_eval(base, y0, q + 1);

    std::vector<Jet> out = base.eval(y_in);
    out.resize(static_cast<size_t>(2 * n), Jet::constant(0.0, in[0].nvars(), q));
    for (int r = 0; r < n; ++r) {
      Jet u = Jet::constant(0.0, in[0].nvars(), q);
      for (int a = 0; a < m; ++a)
        u += v_in[a] * compose(x_high[static_cast<size_t>(r)].derivative(a), y_in);
      out[static_cast<size_t>(n + r)] = u;
    }
    return out;
  };
  return SmoothMap(2 * m, 2 * n, std::move(ev), 2, 2 * m);
}

/// Horizontal and vertical lifts of X at (x, u) in the bundle chart basis:
/// X^h = (X, -u^s X^t Gamma^r_st), X^v = (0, X).
struct LiftedVectors {
  std::vector<double> h, v;
};

inline LiftedVectors lift_vectors_TN(const ChartedManifold& man, std::span<const double> x,
                                     std::span<const double> u, std::span<const double> X) {
  const int n = man.dim;
  if (static_cast<int>(u.size()) != n || static_cast<int>(X.size()) != n)
    throw std::invalid_argument(man.name + ": lifts need n-component u and X");
  Ten3<double> gamma = christoffel(man, x);
  LiftedVectors out;
  out.h.assign(static_cast<size_t>(2 * n), 0.0);
  out.v.assign(static_cast<size_t>(2 * n), 0.0);
  for (int r = 0; r < n; ++r) {
    out.h[static_cast<size_t>(r)] = X[r];
    out.v[static_cast<size_t>(n + r)] = X[r];
    for (int s = 0; s < n; ++s)
      for (int t = 0; t < n; ++t) out.h[static_cast<size_t>(n + r)] -= gamma(r, s, t) * u[s] * X[t];
  }
  return out;
}

/// K(W) = (W-fiber^r + Gamma^r_st u^s W^t) d/dx^r. Annihilates horizontal
/// lifts, restores X from X^v.
inline std::vector<double> connection_map(const ChartedManifold& man, std::span<const double> x,
                                          std::span<const double> u, std::span<const double> W) {
  const int n = man.dim;
  if (static_cast<int>(u.size()) != n)
    throw std::invalid_argument(man.name + ": connection map needs an n-component u");
  if (static_cast<int>(W.size()) != 2 * n)
    throw std::invalid_argument(man.name + ": connection map needs a 2n-component input");
  Ten3<double> gamma = christoffel(man, x);
  std::vector<double> out(static_cast<size_t>(n), 0.0);
  for (int r = 0; r < n; ++r) {
    out[static_cast<size_t>(r)] = W[n + r];
    for (int s = 0; s < n; ++s)
      for (int t = 0; t < n; ++t) out[static_cast<size_t>(r)] += gamma(r, s, t) * u[s] * W[t];
  }
  return out;
}

/// K_a^r = v^b nabla_b B_a^r and the contraction K = v^a K_a. Each K_a is the
/// fiber-direction defect picked up by the lifted coordinate frame; for a
/// totally geodesic immersion all of them vanish.
struct KVectors {
  Mat<double> per_index;      // (a, r)
  std::vector<double> total;  // n components
};

inline KVectors k_vectors(const ImmersionData& imm, const LiftedPoint& p) {
  const int m = imm.source.dim, n = imm.target.dim;
  Ten3<double> nb = vdwb_derivative(imm, p.y);
  KVectors kv;
  kv.per_index = Mat<double>(m, n);
  kv.total.assign(static_cast<size_t>(n), 0.0);
  for (int a = 0; a < m; ++a)
    for (int r = 0; r < n; ++r) {
      double acc = 0.0;
      for (int b = 0; b < m; ++b) acc += p.v[static_cast<size_t>(b)] * nb(a, b, r);
      kv.per_index(a, r) = acc;
      kv.total[static_cast<size_t>(r)] += p.v[static_cast<size_t>(a)] * acc;
    }
  return kv;
}

/// Coordinate frame of the lifted submanifold in the bundle chart: column a
/// is d/dy^a = (B_a, v^b del_b B_a), column m+a is d/dv^a = (0, B_a). Equals
/// the jacobian of lift_immersion column for column.
inline Mat<double> lifted_tangent_frame(const ImmersionData& imm, const LiftedPoint& p) {
  ImmersionJets ij = immersion_jets(imm, p.y);
  const int m = imm.source.dim, n = imm.target.dim;
  Mat<double> T(2 * n, 2 * m, 0.0);
  for (int a = 0; a < m; ++a)
    for (int r = 0; r < n; ++r) {
      T(r, a) = ij.B(a, r);
      double acc = 0.0;
      for (int b = 0; b < m; ++b) acc += p.v[static_cast<size_t>(b)] * ij.dB(a, b, r);
      T(n + r, a) = acc;
      T(n + r, m + a) = ij.B(a, r);
    }
  return T;
}

/// Max-norm residual of (delta_a)^{h_N} = (delta_a)^{h_M} - K_a and
/// (delta_a)^{v_N} = (delta_a)^{v_M}. Every term takes its own code path:
/// N-lifts at (x, u), M-lifts at (y, v) pushed forward by the lifted jacobian,
/// K_a from the tangential-derivative defect.
inline double verify_lift_relation(const ImmersionData& imm, const LiftedPoint& p) {
  const int m = imm.source.dim, n = imm.target.dim;
  ImmersionJets ij = immersion_jets(imm, p.y);
  Eigen::MatrixXd J = jacobian(lift_immersion(imm), source_coords(p));
  KVectors kv = k_vectors(imm, p);

  double worst = 0.0;
  for (int a = 0; a < m; ++a) {
    std::vector<double> Ba(static_cast<size_t>(n));
    for (int r = 0; r < n; ++r) Ba[static_cast<size_t>(r)] = ij.B(a, r);
    LiftedVectors lift_N = lift_vectors_TN(imm.target, p.x, p.u, Ba);

    std::vector<double> ea(static_cast<size_t>(m), 0.0);
    ea[static_cast<size_t>(a)] = 1.0;
    LiftedVectors lift_M = lift_vectors_TN(imm.source, p.y, p.v, ea);

    for (int i = 0; i < 2 * n; ++i) {
      double push_h = 0.0, push_v = 0.0;
      for (int j = 0; j < 2 * m; ++j) {
        push_h += J(i, j) * lift_M.h[static_cast<size_t>(j)];
        push_v += J(i, j) * lift_M.v[static_cast<size_t>(j)];
      }
      const double ka = i >= n ? kv.per_index(a, i - n) : 0.0;
      worst = std::max(worst, std::abs(lift_N.h[static_cast<size_t>(i)] - (push_h - ka)));
      worst = std::max(worst, std::abs(lift_N.v[static_cast<size_t>(i)] - push_v));
    }
  }
  return worst;
}

/// Max-norm of d(pi_N)(W) - df(d(pi_M)(W)) over the coordinate frame vectors
/// W of the source bundle chart. Both projections just keep base components;
/// the content is that the lifted jacobian's base block equals df.
inline double verify_projection_lemma(const ImmersionData& imm, const LiftedPoint& p) {
  const int m = imm.source.dim, n = imm.target.dim;
  Eigen::MatrixXd J = jacobian(lift_immersion(imm), source_coords(p));
  Eigen::MatrixXd Bm = jacobian(imm.map, p.y);

  double worst = 0.0;
  for (int j = 0; j < 2 * m; ++j)
    for (int r = 0; r < n; ++r) {
      const double lhs = J(r, j);
      const double rhs = j < m ? Bm(r, j) : 0.0;
      worst = std::max(worst, std::abs(lhs - rhs));
    }
  return worst;
}

/// Max-norm residual of K_N(d/dv^a) = df(K_M(d/dv^a)) and
/// K_N(d/dy^a) = v^b nabla_b B_a + df(K_M(d/dy^a)), with K_M evaluated in the
/// source bundle and pushed forward by df.
inline double verify_connection_lemma(const ImmersionData& imm, const LiftedPoint& p) {
  const int m = imm.source.dim, n = imm.target.dim;
  Eigen::MatrixXd J = jacobian(lift_immersion(imm), source_coords(p));
  Eigen::MatrixXd Bm = jacobian(imm.map, p.y);
  KVectors kv = k_vectors(imm, p);

  double worst = 0.0;
  for (int j = 0; j < 2 * m; ++j) {
    std::vector<double> W(static_cast<size_t>(2 * n));
    for (int i = 0; i < 2 * n; ++i) W[static_cast<size_t>(i)] = J(i, j);
    std::vector<double> lhs = connection_map(imm.target, p.x, p.u, W);

    std::vector<double> ej(static_cast<size_t>(2 * m), 0.0);
    ej[static_cast<size_t>(j)] = 1.0;
    std::vector<double> km = connection_map(imm.source, p.y, p.v, ej);

    for (int r = 0; r < n; ++r) {
      double rhs = 0.0;
      for (int c = 0; c < m; ++c) rhs += Bm(r, c) * km[static_cast<size_t>(c)];
      if (j < m) rhs += kv.per_index(j, r);
      worst = std::max(worst, std::abs(lhs[static_cast<size_t>(r)] - rhs));
    }
  }
  return worst;
}

/// Splitting of one normal into horizontal/vertical parts and their
/// tangent-to-M / normal-to-M pieces (all n-vectors at the base point).
struct NormalParts {
  std::vector<double> h_tan, h_nor, v_tan, v_nor;
};

struct LMFrameBundle {
  LiftedPoint point;
  Mat<double> tangent;             // 2n x 2m coordinate frame of LM
  Mat<double> k;                   // (a, r) K-vectors
  std::vector<double> k_total;     // K = v^a K_a
  Mat<double> normals;             // 2n x 2(n-m), G-orthogonal to the tangent columns
  Mat<double> gram;                // G-products among the normals
  std::vector<NormalParts> parts;  // one split per normal column
  Mat<double> G;                   // bundle metric at the point
};

/// G-orthogonal complement of the lifted tangent space. The adjoint projector
/// P = I - T (T^t G T)^{-1} T^t G is applied to the chart basis vectors in
/// fixed index order and the images are rank-filtered; this stays valid for
/// indefinite G, where naive Gram-Schmidt can divide by a null norm.
inline LMFrameBundle normal_space_LM(const GNaturalGenerators& gen, const ImmersionData& imm,
                                     const LiftedPoint& p) {
  const int m = imm.source.dim, n = imm.target.dim;
  const int k = n - m;

  LMFrameBundle fb;
  fb.point = p;
  fb.G = metric_natural_at(gen, imm.target, p.x, p.u);
  fb.tangent = lifted_tangent_frame(imm, p);
  KVectors kv = k_vectors(imm, p);
  fb.k = kv.per_index;
  fb.k_total = kv.total;

  Mat<double> TG(2 * m, 2 * n, 0.0);  // T^t G
  for (int i = 0; i < 2 * m; ++i)
    for (int j = 0; j < 2 * n; ++j) {
      double acc = 0.0;
      for (int l = 0; l < 2 * n; ++l) acc += fb.tangent(l, i) * fb.G(l, j);
      TG(i, j) = acc;
    }
  Mat<double> TGT(2 * m, 2 * m, 0.0);
  for (int i = 0; i < 2 * m; ++i)
    for (int j = 0; j < 2 * m; ++j) {
      double acc = 0.0;
      for (int l = 0; l < 2 * n; ++l) acc += TG(i, l) * fb.tangent(l, j);
      TGT(i, j) = acc;
    }

  Mat<double> X;  // (T^t G T)^{-1} T^t G
  try {
    X = solve(TGT, TG);
  } catch (const std::domain_error&) {
    throw std::domain_error(imm.name +
                            ": bundle metric degenerates along the lifted tangent space at " +
                            format_point(target_coords(p)));
  }

  std::vector<std::vector<double>> basis;
  fb.normals = Mat<double>(2 * n, 2 * k, 0.0);
  int found = 0;
  for (int c = 0; c < 2 * n && found < 2 * k; ++c) {
    std::vector<double> w(static_cast<size_t>(2 * n), 0.0);
    w[static_cast<size_t>(c)] = 1.0;
    for (int i = 0; i < 2 * n; ++i) {
      double acc = 0.0;
      for (int j = 0; j < 2 * m; ++j) acc += fb.tangent(i, j) * X(j, c);
      w[static_cast<size_t>(i)] -= acc;
    }
    for (const auto& b : basis) {
      double proj = 0.0;
      for (int i = 0; i < 2 * n; ++i) proj += w[static_cast<size_t>(i)] * b[static_cast<size_t>(i)];
      for (int i = 0; i < 2 * n; ++i) w[static_cast<size_t>(i)] -= proj * b[static_cast<size_t>(i)];
    }
    double nm = 0.0;
    for (double c2 : w) nm += c2 * c2;
    nm = std::sqrt(nm);
    if (nm < 1e-8) continue;
    for (double& c2 : w) c2 /= nm;
    for (double c2 : w) {
      if (std::abs(c2) > 1e-10) {
        if (c2 < 0.0)
          for (double& cc : w) cc = -cc;
        break;
      }
    }
    for (int i = 0; i < 2 * n; ++i) fb.normals(i, found) = w[static_cast<size_t>(i)];
    basis.push_back(std::move(w));
    ++found;
  }
  if (found != 2 * k)
    throw std::domain_error(imm.name + ": normal complement rank collapse at " +
                            format_point(target_coords(p)) + " (found " + std::to_string(found) +
                            " of " + std::to_string(2 * k) + ")");

  fb.gram = Mat<double>(2 * k, 2 * k, 0.0);
  for (int i = 0; i < 2 * k; ++i)
    for (int j = 0; j < 2 * k; ++j) {
      double acc = 0.0;
      for (int r = 0; r < 2 * n; ++r)
        for (int s = 0; s < 2 * n; ++s) acc += fb.normals(r, i) * fb.G(r, s) * fb.normals(s, j);
      fb.gram(i, j) = acc;
    }

  // H = base part, V = K(normal); each splits g-orthogonally against span{B_a}.
  ImmersionJets ij = immersion_jets(imm, p.y);
  Mat<double> g = metric_at(imm.target, p.x);
  Mat<double> gind_inv = inverse(induced_metric(imm, p.y));
  auto split = [&](const std::vector<double>& vec) {
    std::vector<double> alpha(static_cast<size_t>(m), 0.0);
    for (int c = 0; c < m; ++c)
      for (int d = 0; d < m; ++d)
        for (int t = 0; t < n; ++t)
          for (int r = 0; r < n; ++r)
            alpha[static_cast<size_t>(c)] +=
                gind_inv(c, d) * ij.B(d, t) * g(t, r) * vec[static_cast<size_t>(r)];
    std::vector<double> tan(static_cast<size_t>(n), 0.0), nor(vec);
    for (int r = 0; r < n; ++r) {
      for (int c = 0; c < m; ++c) tan[static_cast<size_t>(r)] += alpha[static_cast<size_t>(c)] * ij.B(c, r);
      nor[static_cast<size_t>(r)] -= tan[static_cast<size_t>(r)];
    }
    return std::make_pair(tan, nor);
  };
  for (int c = 0; c < 2 * k; ++c) {
    std::vector<double> N(static_cast<size_t>(2 * n));
    for (int i = 0; i < 2 * n; ++i) N[static_cast<size_t>(i)] = fb.normals(i, c);
    std::vector<double> H(N.begin(), N.begin() + n);
    std::vector<double> V = connection_map(imm.target, p.x, p.u, N);
    auto [ht, hn] = split(H);
    auto [vt, vn] = split(V);
    fb.parts.push_back(NormalParts{ht, hn, vt, vn});
  }
  return fb;
}

/// Residuals of the normal-field constraint system, maximized over the frame
/// from normal_space_LM. lemma_h/lemma_v are the solved forms tying the
/// tangential masses to g(K, a2 H_nor + a1 V_nor); contraction is the raw
/// F2 g(H_tan,u) + F1 g(V_tan,u) = 0 identity. Per-index forms only hold for
/// constant a1, a2 and are opt-in.
struct NormalConstraintReport {
  double lemma_h = 0.0;
  double lemma_v = 0.0;
  double contraction = 0.0;
  double per_index = 0.0;
  bool per_index_checked = false;
  double tangential_mass = 0.0;  // max ||H_tan||_g + ||V_tan||_g
};

inline NormalConstraintReport verify_normal_constraints(const GNaturalGenerators& gen,
                                                        const ImmersionData& imm,
                                                        const LiftedPoint& p,
                                                        bool per_index_forms = false) {
  const int m = imm.source.dim, n = imm.target.dim;
  LMFrameBundle fb = normal_space_LM(gen, imm, p);
  Mat<double> g = metric_at(imm.target, p.x);
  ImmersionJets ij = immersion_jets(imm, p.y);

  auto gdot = [&](std::span<const double> a, std::span<const double> b) {
    double acc = 0.0;
    for (int r = 0; r < n; ++r)
      for (int s = 0; s < n; ++s) acc += g(r, s) * a[r] * b[s];
    return acc;
  };

  const double t = gdot(p.u, p.u);
  GNaturalScalars s = scalars_at(gen, t);

  NormalConstraintReport rep;
  rep.per_index_checked = per_index_forms;
  for (const NormalParts& np : fb.parts) {
    std::vector<double> w(static_cast<size_t>(n));
    for (int r = 0; r < n; ++r)
      w[static_cast<size_t>(r)] =
          s.a2 * np.h_nor[static_cast<size_t>(r)] + s.a1 * np.v_nor[static_cast<size_t>(r)];
    const double gKw = gdot(fb.k_total, w);
    const double ghu = gdot(np.h_tan, p.u);
    const double gvu = gdot(np.v_tan, p.u);
    rep.lemma_h = std::max(rep.lemma_h, std::abs(ghu + s.F1 / s.F * gKw));
    rep.lemma_v = std::max(rep.lemma_v, std::abs(gvu - s.F2 / s.F * gKw));
    rep.contraction = std::max(rep.contraction, std::abs(s.F2 * ghu + s.F1 * gvu));
    rep.tangential_mass =
        std::max(rep.tangential_mass, std::sqrt(std::max(gdot(np.h_tan, np.h_tan), 0.0)) +
                                          std::sqrt(std::max(gdot(np.v_tan, np.v_tan), 0.0)));
    if (per_index_forms)
      for (int a = 0; a < m; ++a) {
        std::vector<double> Ba(static_cast<size_t>(n)), Ka(static_cast<size_t>(n));
        for (int r = 0; r < n; ++r) {
          Ba[static_cast<size_t>(r)] = ij.B(a, r);
          Ka[static_cast<size_t>(r)] = fb.k(a, r);
        }
        const double gKaw = gdot(Ka, w);
        rep.per_index = std::max(rep.per_index, std::abs(gdot(np.h_tan, Ba) + s.F1 / s.F * gKaw));
        rep.per_index = std::max(rep.per_index, std::abs(gdot(np.v_tan, Ba) - s.F2 / s.F * gKaw));
      }
  }
  return rep;
}

/// Case id from the sign/vanishing pattern of (a1, A = a1+a3, a2) subject to
/// a = a1 A - a2^2 != 0: 1 when a1 and A are both nonzero, 2 when both vanish,
/// 3/4 when only A vanishes (a1 < 0 / > 0), 5/6 when only a1 vanishes
/// (A < 0 / > 0). "Zero" means |value| <= 1e-10 relative to the scalar scale;
/// values within 10x of that band are rejected so the selection never
/// straddles a boundary.
inline int totg_case_pattern(double a1, double A, double a2) {
  const double scale = std::max({std::abs(a1), std::abs(A), std::abs(a2)});
  const double a = a1 * A - a2 * a2;
  if (scale == 0.0 || std::abs(a) <= 1e-10 * scale * scale)
    throw std::domain_error("normal frame undefined: a1(a1+a3) - a2^2 = " + std::to_string(a));
  if (std::abs(a) <= 1e-9 * scale * scale)
    throw std::domain_error("normal frame rejected: a1(a1+a3) - a2^2 = " + std::to_string(a) +
                            " sits in the case-boundary dead zone");
  auto cls = [&](double xv, const char* label) {
    if (std::abs(xv) <= 1e-10 * scale) return 0;
    if (std::abs(xv) <= 1e-9 * scale)
      throw std::domain_error(std::string("normal frame rejected: ") + label + " = " +
                              std::to_string(xv) + " sits in the case-boundary dead zone");
    return xv > 0.0 ? 1 : -1;
  };
  const int z1 = cls(a1, "a1");
  const int zA = cls(A, "a1+a3");
  if (z1 != 0 && zA != 0) return 1;
  if (z1 == 0 && zA == 0) return 2;
  if (zA == 0) return z1 < 0 ? 3 : 4;
  return zA < 0 ? 5 : 6;
}

/// Normal frame {S_x, T_x} of the lift of a totally geodesic immersion,
/// assembled from the lifts of the deterministic base normal frame eta_x with
/// case-dependent coefficients. c_ss and c_tt are the multipliers the Gram
/// matrix must show against g(eta_x, eta_y); the S/T cross block vanishes in
/// every case.
struct TotgNormalFrame {
  int case_id = 0;
  double eps = 0.0;
  double delta = 0.0;  // meaningful in case 1 only
  Mat<double> eta;     // n x (n-m) base frame
  Mat<double> S, T;    // 2n x (n-m)
  Mat<double> gram;    // 2(n-m) square, order (S..., T...)
  double c_ss = 0.0, c_tt = 0.0;
};

inline TotgNormalFrame normal_frame_totg(const GNaturalGenerators& gen, const ImmersionData& imm,
                                         const LiftedPoint& p) {
  const int m = imm.source.dim, n = imm.target.dim;
  const int k = n - m;

  SecondFundamentalForm h = second_fundamental_form(imm, p.y);
  double hmax = 0.0;
  for (int a = 0; a < m; ++a)
    for (int b = 0; b < m; ++b)
      for (int x = 0; x < k; ++x) hmax = std::max(hmax, std::abs(h.scalar(a, b, x)));
  if (hmax > 1e-8)
    throw std::domain_error(imm.name + ": base immersion is not totally geodesic at " +
                            format_point(p.y) + " (|h| = " + std::to_string(hmax) + ")");

  Mat<double> g = metric_at(imm.target, p.x);
  double t = 0.0;
  for (int r = 0; r < n; ++r)
    for (int s2 = 0; s2 < n; ++s2)
      t += g(r, s2) * p.u[static_cast<size_t>(r)] * p.u[static_cast<size_t>(s2)];
  GNaturalScalars s = scalars_at(gen, t);

  TotgNormalFrame out;
  out.case_id = totg_case_pattern(s.a1, s.A, s.a2);
  out.eta = h.frame.vectors;

  double sh = 0.0, sv = 0.0, th = 0.0, tv = 0.0;
  switch (out.case_id) {
    case 1: {
      out.eps = s.a > 0.0 ? 1.0 : -1.0;
      out.delta = s.a1 > 0.0 ? 1.0 : -1.0;
      const double ra = std::sqrt(std::abs(s.a)), r1 = std::sqrt(std::abs(s.a1));
      sh = out.eps * out.delta * r1 / ra;
      sv = -out.eps * out.delta * s.a2 * r1 / (s.a1 * ra);
      tv = out.delta / r1;
      out.c_ss = out.eps * out.delta;
      out.c_tt = out.delta;
      break;
    }
    case 2: {
      out.eps = s.a2 > 0.0 ? 1.0 : -1.0;
      sh = out.eps / (2.0 * s.a2);
      sv = -1.0;
      th = sh;
      tv = 1.0;
      out.c_ss = -out.eps;
      out.c_tt = out.eps;
      break;
    }
    case 3: {
      out.eps = -1.0;
      const double w = std::sqrt(3.0) * std::sqrt(std::abs(s.a1));
      sh = s.a1 / (w * s.a2);
      sv = 1.0 / w;
      th = 2.0 * s.a1 / (w * s.a2);
      tv = -1.0 / w;
      out.c_ss = -1.0;
      out.c_tt = 1.0;
      break;
    }
    case 4: {
      out.eps = 1.0;
      const double w = std::sqrt(s.a1);
      sh = s.a1 / (w * s.a2);
      sv = -1.0 / w;
      tv = 1.0 / w;
      out.c_ss = -1.0;
      out.c_tt = 1.0;
      break;
    }
    case 5: {
      out.eps = -1.0;
      const double w = std::sqrt(3.0) * std::sqrt(std::abs(s.A));
      sv = s.A / (w * s.a2);
      sh = 1.0 / w;
      tv = 2.0 * s.A / (w * s.a2);
      th = -1.0 / w;
      out.c_ss = -1.0;
      out.c_tt = 1.0;
      break;
    }
    case 6: {
      out.eps = 1.0;
      const double w = std::sqrt(s.A);
      sv = s.A / (w * s.a2);
      sh = -1.0 / w;
      th = 1.0 / w;
      out.c_ss = -1.0;
      out.c_tt = 1.0;
      break;
    }
    default:
      throw std::logic_error("unreachable case id");
  }

  out.S = Mat<double>(2 * n, k, 0.0);
  out.T = Mat<double>(2 * n, k, 0.0);
  for (int x = 0; x < k; ++x) {
    std::vector<double> eta(static_cast<size_t>(n));
    for (int r = 0; r < n; ++r) eta[static_cast<size_t>(r)] = out.eta(r, x);
    LiftedVectors lv = lift_vectors_TN(imm.target, p.x, p.u, eta);
    for (int i = 0; i < 2 * n; ++i) {
      out.S(i, x) = sh * lv.h[static_cast<size_t>(i)] + sv * lv.v[static_cast<size_t>(i)];
      out.T(i, x) = th * lv.h[static_cast<size_t>(i)] + tv * lv.v[static_cast<size_t>(i)];
    }
  }

  Mat<double> G = metric_natural_at(gen, imm.target, p.x, p.u);
  auto col = [&](int j) {
    std::vector<double> c(static_cast<size_t>(2 * n));
    for (int i = 0; i < 2 * n; ++i)
      c[static_cast<size_t>(i)] = j < k ? out.S(i, j) : out.T(i, j - k);
    return c;
  };
  out.gram = Mat<double>(2 * k, 2 * k, 0.0);
  for (int i = 0; i < 2 * k; ++i) {
    std::vector<double> ci = col(i);
    for (int j = 0; j < 2 * k; ++j) {
      std::vector<double> cj = col(j);
      double acc = 0.0;
      for (int r = 0; r < 2 * n; ++r)
        for (int s2 = 0; s2 < 2 * n; ++s2) acc += ci[static_cast<size_t>(r)] * G(r, s2) * cj[static_cast<size_t>(s2)];
      out.gram(i, j) = acc;
    }
  }
  return out;
}

}  // namespace tbg
