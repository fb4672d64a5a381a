#pragma once

#include <cmath>
#include <span>
#include <string>
#include <vector>

#include "tbg/manifold.hpp"

namespace tbg {

/// Isometric immersion f: source -> target. The source chart carries its own
/// metric field; it must agree with the metric induced by the map (checked,
/// never inferred).
struct ImmersionData {
  ChartedManifold source;  // dim m
  ChartedManifold target;  // dim n > m
  SmoothMap map;           // y^a -> x^r, declared rank m
  std::string name;
};

inline ImmersionData make_immersion(ChartedManifold source, ChartedManifold target,
                                    SmoothMap map, std::string name) {
  if (source.dim >= target.dim)
    throw ConfigError(name + ": immersion needs source dim < target dim");
  if (map.arity_in() != source.dim || map.arity_out() != target.dim)
    throw ConfigError(name + ": map arities do not match the charts");
  ImmersionData imm{std::move(source), std::move(target), map.with_rank(source.dim),
                    std::move(name)};
  return imm;
}

inline std::vector<double> image_point(const ImmersionData& imm, std::span<const double> y) {
  return point_eval(imm.map, y);
}

/// First and second derivatives of the immersion map: B(a,r) = del_a x^r and
/// dB(a,b,r) = del_a del_b x^r.
struct ImmersionJets {
  std::vector<double> x;  // image point
  Mat<double> B;          // m x n, row a, column r
  Ten3<double> dB;        // (a, b, r)
};

inline ImmersionJets immersion_jets(const ImmersionData& imm, std::span<const double> y) {
  check_admissible(imm.source, y);
  const int m = imm.source.dim, n = imm.target.dim;
  (void)jacobian(imm.map, y);  // enforces the declared immersion rank
  std::vector<Jet> jets = jet_eval(imm.map, y, 2);

  ImmersionJets out;
  out.x.resize(static_cast<size_t>(n));
  out.B = Mat<double>(m, n);
  out.dB = Ten3<double>(m, m, n);
  for (int r = 0; r < n; ++r) {
    const Jet& j = jets[static_cast<size_t>(r)];
    out.x[static_cast<size_t>(r)] = j.value();
    for (int a = 0; a < m; ++a) {
      out.B(a, r) = j.d1(a);
      for (int b = 0; b < m; ++b) out.dB(a, b, r) = j.d2(a, b);
    }
  }
  check_admissible(imm.target, out.x);
  return out;
}

/// g_ab = g_rs B_a^r B_b^s; verified against the declared source metric.
inline Mat<double> induced_metric(const ImmersionData& imm, std::span<const double> y) {
  ImmersionJets ij = immersion_jets(imm, y);
  const int m = imm.source.dim, n = imm.target.dim;
  Mat<double> g = metric_at(imm.target, ij.x);

  Mat<double> induced(m, m);
  for (int a = 0; a < m; ++a)
    for (int b = 0; b < m; ++b) {
      double acc = 0.0;
      for (int r = 0; r < n; ++r)
        for (int s = 0; s < n; ++s) acc += g(r, s) * ij.B(a, r) * ij.B(b, s);
      induced(a, b) = acc;
    }

  Mat<double> declared = metric_at(imm.source, y);
  double worst = 0.0;
  for (int a = 0; a < m; ++a)
    for (int b = 0; b < m; ++b) worst = std::max(worst, std::abs(induced(a, b) - declared(a, b)));
  if (worst > 1e-8)
    throw ConfigError(imm.name + ": immersion is not isometric at " + format_point(y) +
                      " (metric mismatch " + std::to_string(worst) + ")");
  return induced;
}

/// Gamma_ab^c = [B_ab^r + Gamma^r_st B_a^s B_b^t] B_r^c with
/// B_r^c = g^{cd} B_d^t g_tr; agrees with the source chart's own
/// Levi-Civita coefficients because the immersion is isometric.
inline Ten3<double> induced_christoffel(const ImmersionData& imm, std::span<const double> y) {
  ImmersionJets ij = immersion_jets(imm, y);
  const int m = imm.source.dim, n = imm.target.dim;
  Mat<double> g = metric_at(imm.target, ij.x);
  Ten3<double> gamma_t = christoffel(imm.target, ij.x);
  Mat<double> gind_inv = inverse(induced_metric(imm, y));

  // B_r^c: projector coefficients onto the tangent space.
  Mat<double> Brc(n, m);
  for (int r = 0; r < n; ++r)
    for (int c = 0; c < m; ++c) {
      double acc = 0.0;
      for (int d = 0; d < m; ++d)
        for (int t = 0; t < n; ++t) acc += gind_inv(c, d) * ij.B(d, t) * g(t, r);
      Brc(r, c) = acc;
    }

  Ten3<double> out(m, m, m);
  for (int a = 0; a < m; ++a)
    for (int b = 0; b < m; ++b)
      for (int c = 0; c < m; ++c) {
        double acc = 0.0;
        for (int r = 0; r < n; ++r) {
          double amb = ij.dB(a, b, r);
          for (int s = 0; s < n; ++s)
            for (int t = 0; t < n; ++t) amb += gamma_t(r, s, t) * ij.B(a, s) * ij.B(b, t);
          acc += amb * Brc(r, c);
        }
        out(a, b, c) = acc;
      }
  return out;
}

/// The tangential-derivative defect del_b B_a + Gamma(B_a,B_b) - Gamma_ind B:
/// for an isometric immersion this vector is g-normal to the submanifold and
/// carries the whole second fundamental form. Index order (a, b, r).
inline Ten3<double> vdwb_derivative(const ImmersionData& imm, std::span<const double> y) {
  ImmersionJets ij = immersion_jets(imm, y);
  const int m = imm.source.dim, n = imm.target.dim;
  Ten3<double> gamma_t = christoffel(imm.target, ij.x);
  Ten3<double> gamma_i = induced_christoffel(imm, y);

  Ten3<double> out(m, m, n);
  for (int a = 0; a < m; ++a)
    for (int b = 0; b < m; ++b)
      for (int r = 0; r < n; ++r) {
        double acc = ij.dB(a, b, r);
        for (int s = 0; s < n; ++s)
          for (int t = 0; t < n; ++t) acc += gamma_t(r, s, t) * ij.B(a, s) * ij.B(b, t);
        for (int c = 0; c < m; ++c) acc -= gamma_i(a, b, c) * ij.B(c, r);
        out(a, b, r) = acc;
      }
  return out;
}

struct NormalFrame {
  Mat<double> vectors;  // n x (n-m); columns are unit normals N_x^r
  Mat<double> gram;     // (n-m) x (n-m)
};

/// Orthonormal basis of the g-orthogonal complement of the tangent space:
/// chart basis vectors are projected off the tangent span and fed to
/// Gram-Schmidt in fixed index order; each survivor's first nonzero
/// component is made positive so the frame is deterministic.
inline NormalFrame normal_frame(const ImmersionData& imm, std::span<const double> y) {
  ImmersionJets ij = immersion_jets(imm, y);
  const int m = imm.source.dim, n = imm.target.dim;
  Mat<double> g = metric_at(imm.target, ij.x);

  auto dot = [&](const std::vector<double>& v, const std::vector<double>& w) {
    double acc = 0.0;
    for (int r = 0; r < n; ++r)
      for (int s = 0; s < n; ++s) acc += g(r, s) * v[static_cast<size_t>(r)] * w[static_cast<size_t>(s)];
    return acc;
  };

  // Tangent columns, g-orthonormalized, to project against.
  std::vector<std::vector<double>> tangent;
  for (int a = 0; a < m; ++a) {
    std::vector<double> v(static_cast<size_t>(n));
    for (int r = 0; r < n; ++r) v[static_cast<size_t>(r)] = ij.B(a, r);
    for (const auto& t : tangent) {
      const double c = dot(v, t);
      for (int r = 0; r < n; ++r) v[static_cast<size_t>(r)] -= c * t[static_cast<size_t>(r)];
    }
    const double nm = std::sqrt(dot(v, v));
    if (nm < 1e-10)
      throw std::domain_error(imm.name + ": tangent frame degenerate at " + format_point(y));
    for (double& c : v) c /= nm;
    tangent.push_back(std::move(v));
  }

  std::vector<std::vector<double>> normals;
  for (int r0 = 0; r0 < n && static_cast<int>(normals.size()) < n - m; ++r0) {
    std::vector<double> v(static_cast<size_t>(n), 0.0);
    v[static_cast<size_t>(r0)] = 1.0;
    for (const auto& t : tangent) {
      const double c = dot(v, t);
      for (int r = 0; r < n; ++r) v[static_cast<size_t>(r)] -= c * t[static_cast<size_t>(r)];
    }
    for (const auto& w : normals) {
      const double c = dot(v, w);
      for (int r = 0; r < n; ++r) v[static_cast<size_t>(r)] -= c * w[static_cast<size_t>(r)];
    }
    const double nm = std::sqrt(std::max(dot(v, v), 0.0));
    if (nm < 1e-8) continue;  // chart vector already spanned; try the next
    for (double& c : v) c /= nm;
    for (double c : v) {
      if (std::abs(c) > 1e-10) {
        if (c < 0.0)
          for (double& cc : v) cc = -cc;
        break;
      }
    }
    normals.push_back(std::move(v));
  }
  if (static_cast<int>(normals.size()) != n - m)
    throw std::domain_error(imm.name + ": normal space rank collapse at " + format_point(y) +
                            " (found " + std::to_string(normals.size()) + " of " +
                            std::to_string(n - m) + ")");

  NormalFrame frame;
  frame.vectors = Mat<double>(n, n - m);
  for (int x = 0; x < n - m; ++x)
    for (int r = 0; r < n; ++r) frame.vectors(r, x) = normals[static_cast<size_t>(x)][static_cast<size_t>(r)];
  frame.gram = Mat<double>(n - m, n - m);
  for (int x = 0; x < n - m; ++x)
    for (int z = 0; z < n - m; ++z)
      frame.gram(x, z) = dot(normals[static_cast<size_t>(x)], normals[static_cast<size_t>(z)]);
  return frame;
}

struct SecondFundamentalForm {
  Ten3<double> vec;     // (a, b, r): normal-valued components
  Ten3<double> scalar;  // (a, b, x): h_ab^x against the deterministic frame
  NormalFrame frame;
};

inline SecondFundamentalForm second_fundamental_form(const ImmersionData& imm,
                                                     std::span<const double> y) {
  ImmersionJets ij = immersion_jets(imm, y);
  const int m = imm.source.dim, n = imm.target.dim;
  Mat<double> g = metric_at(imm.target, ij.x);

  SecondFundamentalForm h;
  h.vec = vdwb_derivative(imm, y);
  h.frame = normal_frame(imm, y);
  h.scalar = Ten3<double>(m, m, n - m);
  for (int a = 0; a < m; ++a)
    for (int b = 0; b < m; ++b)
      for (int x = 0; x < n - m; ++x) {
        double acc = 0.0;
        for (int r = 0; r < n; ++r)
          for (int s = 0; s < n; ++s) acc += g(r, s) * h.vec(a, b, r) * h.frame.vectors(s, x);
        h.scalar(a, b, x) = acc;
      }
  return h;
}

/// Matrix of the shape operator in the source chart basis:
/// g(A_eta X, Y) = g(h(X,Y), eta) for all tangent X, Y.
inline Mat<double> shape_operator(const ImmersionData& imm, std::span<const double> y,
                                  std::span<const double> eta) {
  ImmersionJets ij = immersion_jets(imm, y);
  const int m = imm.source.dim, n = imm.target.dim;
  if (static_cast<int>(eta.size()) != n)
    throw std::invalid_argument(imm.name + ": shape operator direction has wrong dimension");
  Mat<double> g = metric_at(imm.target, ij.x);

  double eta_norm2 = 0.0;
  for (int r = 0; r < n; ++r)
    for (int s = 0; s < n; ++s) eta_norm2 += g(r, s) * eta[r] * eta[s];
  const double scale = std::sqrt(std::max(eta_norm2, 1e-30));
  for (int a = 0; a < m; ++a) {
    double tangency = 0.0;
    double b_norm2 = 0.0;
    for (int r = 0; r < n; ++r)
      for (int s = 0; s < n; ++s) {
        tangency += g(r, s) * eta[r] * ij.B(a, s);
        b_norm2 += g(r, s) * ij.B(a, r) * ij.B(a, s);
      }
    if (std::abs(tangency) > 1e-8 * scale * std::sqrt(b_norm2))
      throw std::invalid_argument(imm.name + ": shape operator direction is not normal at " +
                                  format_point(y) + " (tangency " + std::to_string(tangency) +
                                  ")");
  }

  Ten3<double> hv = vdwb_derivative(imm, y);
  Mat<double> S(m, m);
  for (int a = 0; a < m; ++a)
    for (int b = 0; b < m; ++b) {
      double acc = 0.0;
      for (int r = 0; r < n; ++r)
        for (int s = 0; s < n; ++s) acc += g(r, s) * hv(a, b, r) * eta[s];
      S(a, b) = acc;
    }
  return inverse(induced_metric(imm, y)) * S;
}

struct GeodesicVerdict {
  bool totally_geodesic = false;
  double max_residual = 0.0;
};

/// Max |h_ab^x| over the sample set, compared against tol.
inline GeodesicVerdict is_totally_geodesic(const ImmersionData& imm,
                                           std::span<const std::vector<double>> sample_points,
                                           double tol) {
  if (sample_points.empty())
    throw std::invalid_argument(imm.name + ": totally-geodesic test needs sample points");
  GeodesicVerdict v;
  for (const auto& y : sample_points) {
    SecondFundamentalForm h = second_fundamental_form(imm, y);
    const int m = imm.source.dim, k = imm.target.dim - imm.source.dim;
    for (int a = 0; a < m; ++a)
      for (int b = 0; b < m; ++b)
        for (int x = 0; x < k; ++x)
          v.max_residual = std::max(v.max_residual, std::abs(h.scalar(a, b, x)));
  }
  v.totally_geodesic = v.max_residual <= tol;
  return v;
}

}  // namespace tbg
