#pragma once

#include <array>
#include <cmath>
#include <span>
#include <string>
#include <vector>

#include "tbg/manifold.hpp"

namespace tbg {

inline SmoothMap scalar_map(std::function<Jet(const Jet&)> f) {
  return SmoothMap(1, 1, [f = std::move(f)](std::span<const Jet> in) {
    return std::vector<Jet>{f(in[0])};
  });
}

/// The six generator functions of a metric on the tangent bundle, each a
/// smooth scalar map of t = g(u,u), plus the parameter range the scenario
/// operates on. Nonvanishing conditions are only checkable on [0, t_max];
/// reports carry a banner noting this range limitation.
struct GNaturalGenerators {
  std::array<SmoothMap, 6> maps;  // a1, a2, a3, b1, b2, b3
  double t_max = 16.0;
  std::string name;

  Jet at(int idx, const Jet& t) const {
    const Jet in[] = {t};
    return maps[static_cast<size_t>(idx)].eval(in)[0];
  }
};

inline GNaturalGenerators constant_generators(const std::array<double, 6>& c, std::string name,
                                              double t_max = 16.0) {
  GNaturalGenerators gen;
  gen.name = std::move(name);
  gen.t_max = t_max;
  for (int j = 0; j < 6; ++j)
    gen.maps[static_cast<size_t>(j)] =
        scalar_map([v = c[static_cast<size_t>(j)]](const Jet& t) {
          return Jet::constant(v, t.nvars(), t.order());
        });
  return gen;
}

inline GNaturalGenerators sasaki_generators(double t_max = 16.0) {
  return constant_generators({1.0, 0.0, 0.0, 0.0, 0.0, 0.0}, "sasaki", t_max);
}

inline GNaturalGenerators cheeger_gromoll_generators(double t_max = 16.0) {
  GNaturalGenerators gen;
  gen.name = "cheeger-gromoll";
  gen.t_max = t_max;
  auto a1 = [](const Jet& t) { return 1.0 / (1.0 + t); };
  auto a3 = [](const Jet& t) { return t / (1.0 + t); };
  gen.maps[0] = scalar_map(a1);
  gen.maps[1] = scalar_map([](const Jet& t) { return Jet::constant(0.0, t.nvars(), t.order()); });
  gen.maps[2] = scalar_map(a3);
  gen.maps[3] = scalar_map(a1);
  gen.maps[4] = scalar_map([](const Jet& t) { return Jet::constant(0.0, t.nvars(), t.order()); });
  gen.maps[5] = scalar_map(a3);
  return gen;
}

/// Coefficient lists in ascending powers of t, one per generator.
inline GNaturalGenerators polynomial_generators(const std::array<std::vector<double>, 6>& coeffs,
                                                std::string name, double t_max = 16.0) {
  GNaturalGenerators gen;
  gen.name = std::move(name);
  gen.t_max = t_max;
  for (int j = 0; j < 6; ++j) {
    gen.maps[static_cast<size_t>(j)] =
        scalar_map([cs = coeffs[static_cast<size_t>(j)]](const Jet& t) {
          Jet acc = Jet::constant(0.0, t.nvars(), t.order());
          for (size_t k = cs.size(); k-- > 0;) acc = acc * t + cs[k];
          return acc;
        });
  }
  return gen;
}

struct GNaturalScalars {
  double t = 0.0;
  double a1 = 0.0, a2 = 0.0, a3 = 0.0, b1 = 0.0, b2 = 0.0, b3 = 0.0;
  double A = 0.0, B = 0.0;
  double F1 = 0.0, F2 = 0.0, F3 = 0.0;
  double a = 0.0, F = 0.0;
};

inline GNaturalScalars scalars_at(const GNaturalGenerators& gen, double t) {
  if (t < 0.0 || t > gen.t_max)
    throw ConfigError(gen.name + ": parameter t = " + std::to_string(t) + " outside [0, " +
                      std::to_string(gen.t_max) + "]");
  Jet tj = Jet::constant(t, 1, 0);
  double v[6];
  for (int j = 0; j < 6; ++j) v[j] = gen.at(j, tj).value();

  GNaturalScalars s;
  s.t = t;
  s.a1 = v[0];
  s.a2 = v[1];
  s.a3 = v[2];
  s.b1 = v[3];
  s.b2 = v[4];
  s.b3 = v[5];
  s.A = s.a1 + s.a3;
  s.B = s.b1 + s.b3;
  s.F1 = s.a1 + t * s.b1;
  s.F2 = s.a2 + t * s.b2;
  s.F3 = s.a3 + t * s.b3;
  s.a = s.a1 * s.A - s.a2 * s.a2;
  s.F = s.F1 * (s.F1 + s.F3) - s.F2 * s.F2;
  return s;
}

struct NondegeneracyReport {
  bool nondegenerate = false;
  double min_abs_a = 0.0, min_abs_F = 0.0;
  double argmin_a = 0.0, argmin_F = 0.0;
  double floor = 0.0;
  bool dim1_rule = false;  // only the a(t) clause enforced
};

/// Scans |a(t)| and |F(t)| over the grid against the floor. For a
/// 1-dimensional base only a(t) decides (there F coincides with a once the
/// forced b_j = 0 holds).
inline NondegeneracyReport nondegeneracy_check(const GNaturalGenerators& gen,
                                               std::span<const double> t_grid,
                                               double floor = 1e-8, int base_dim = 2) {
  if (t_grid.empty()) throw std::invalid_argument(gen.name + ": empty nondegeneracy grid");
  NondegeneracyReport rep;
  rep.floor = floor;
  rep.dim1_rule = base_dim == 1;
  bool first = true;
  for (double t : t_grid) {
    GNaturalScalars s = scalars_at(gen, t);
    if (first || std::abs(s.a) < rep.min_abs_a) {
      rep.min_abs_a = std::abs(s.a);
      rep.argmin_a = t;
    }
    if (first || std::abs(s.F) < rep.min_abs_F) {
      rep.min_abs_F = std::abs(s.F);
      rep.argmin_F = t;
    }
    first = false;
  }
  rep.nondegenerate =
      rep.min_abs_a > floor && (rep.dim1_rule || rep.min_abs_F > floor);
  return rep;
}

/// 2n x 2n matrix of the bundle metric in the adapted frame at (x,u):
/// [[A g + B qq^T, a2 g + b2 qq^T], [sym, a1 g + b1 qq^T]] with q = g u.
inline Mat<double> metric_adapted(const GNaturalGenerators& gen, const ChartedManifold& man,
                                  std::span<const double> x, std::span<const double> u,
                                  double floor = 1e-8) {
  const int n = man.dim;
  if (static_cast<int>(u.size()) != n)
    throw ConfigError(gen.name + ": fiber vector dimension mismatch");
  Mat<double> g = metric_at(man, x);

  std::vector<double> q(static_cast<size_t>(n), 0.0);
  double t = 0.0;
  for (int r = 0; r < n; ++r) {
    for (int s = 0; s < n; ++s) q[static_cast<size_t>(r)] += g(r, s) * u[s];
    t += q[static_cast<size_t>(r)] * u[r];
  }

  GNaturalScalars s = scalars_at(gen, t);
  if (n == 1) {
    for (double b : {s.b1, s.b2, s.b3})
      if (std::abs(b) > 1e-12)
        throw ConfigError(gen.name + ": nonzero b_j with a 1-dimensional base");
  }
  if (std::abs(s.a) <= floor || (n > 1 && std::abs(s.F) <= floor))
    throw ConfigError(gen.name + ": degenerate bundle metric at t = " + std::to_string(t) +
                      " (a = " + std::to_string(s.a) + ", F = " + std::to_string(s.F) + ")");

  Mat<double> G(2 * n, 2 * n);
  for (int r = 0; r < n; ++r)
    for (int c = 0; c < n; ++c) {
      const double qq = q[static_cast<size_t>(r)] * q[static_cast<size_t>(c)];
      G(r, c) = s.A * g(r, c) + s.B * qq;
      G(r, n + c) = s.a2 * g(r, c) + s.b2 * qq;
      G(n + r, c) = s.a2 * g(r, c) + s.b2 * qq;
      G(n + r, n + c) = s.a1 * g(r, c) + s.b1 * qq;
    }
  return G;
}

/// Bundle metric in the coordinate basis (d/dx^r, d/du^r) of TN as a smooth
/// map of (x,u), jet-differentiable to order 2 so that the bundle's
/// Levi-Civita coefficients can be formed numerically. The adapted blocks are
/// congruence-transformed by M = [[I,0],[C,I]] with C(r,t) = u^s Gamma^r_st.
inline SmoothMap metric_natural(const GNaturalGenerators& gen, const ChartedManifold& man) {
  const int n = man.dim;
  auto ev = [gen, man, n](std::span<const Jet> z) {
    const int p = z[0].order();
    auto x_jets = z.first(static_cast<size_t>(n));
    auto u_jets = z.subspan(static_cast<size_t>(n));
    const Jet zero = Jet::constant(0.0, z[0].nvars(), p);

    std::vector<Jet> packed = man.metric_field.eval(x_jets);
    Mat<Jet> g = sym_unpack<Jet>(packed, n);

    // Christoffels as pointwise Taylor data in x, chained onto the actual
    // x inputs so derivatives stay exact for arbitrary upstream jets.
    std::vector<double> x0(static_cast<size_t>(n));
    for (int r = 0; r < n; ++r) x0[static_cast<size_t>(r)] = x_jets[static_cast<size_t>(r)].value();
    Ten3<Jet> gamma_local = christoffel_jets(man, x0, p);
    Ten3<Jet> gamma(n, n, n, zero);
    for (int r = 0; r < n; ++r)
      for (int s = 0; s < n; ++s)
        for (int t = 0; t < n; ++t) gamma(r, s, t) = compose(gamma_local(r, s, t), x_jets);

    // q = g u and t = g(u,u)
    std::vector<Jet> q(static_cast<size_t>(n), zero);
    Jet t = zero;
    for (int r = 0; r < n; ++r) {
      for (int s = 0; s < n; ++s) q[static_cast<size_t>(r)] += g(r, s) * u_jets[static_cast<size_t>(s)];
      t += q[static_cast<size_t>(r)] * u_jets[static_cast<size_t>(r)];
    }

    Jet a1 = gen.at(0, t), a2 = gen.at(1, t), a3 = gen.at(2, t);
    Jet b1 = gen.at(3, t), b2 = gen.at(4, t), b3 = gen.at(5, t);
    Jet A = a1 + a3, B = b1 + b3;

    Mat<Jet> Gad(2 * n, 2 * n, zero);
    for (int r = 0; r < n; ++r)
      for (int c = 0; c < n; ++c) {
        Jet qq = q[static_cast<size_t>(r)] * q[static_cast<size_t>(c)];
        Gad(r, c) = A * g(r, c) + B * qq;
        Gad(r, n + c) = a2 * g(r, c) + b2 * qq;
        Gad(n + r, c) = Gad(r, n + c);
        Gad(n + r, n + c) = a1 * g(r, c) + b1 * qq;
      }

    Mat<Jet> M = Mat<Jet>::identity_like(2 * n, zero, Jet::constant(1.0, z[0].nvars(), p));
    for (int r = 0; r < n; ++r)
      for (int tt = 0; tt < n; ++tt) {
        Jet c = zero;
        for (int s = 0; s < n; ++s) c += u_jets[static_cast<size_t>(s)] * gamma(r, s, tt);
        M(n + r, tt) = c;
      }

    Mat<Jet> Gnat = M.transposed() * Gad * M;
    std::vector<Jet> out;
    out.reserve(static_cast<size_t>(sym_count(2 * n)));
    for (int i = 0; i < 2 * n; ++i)
      for (int j = i; j < 2 * n; ++j) out.push_back(Gnat(i, j));
    return out;
  };
  return SmoothMap(2 * n, sym_count(2 * n), std::move(ev), 2);
}

/// Point evaluation of metric_natural as a plain matrix.
inline Mat<double> metric_natural_at(const GNaturalGenerators& gen, const ChartedManifold& man,
                                     std::span<const double> x, std::span<const double> u) {
  (void)metric_adapted(gen, man, x, u);  // degeneracy and guard checks
  const int n = man.dim;
  std::vector<double> xu(static_cast<size_t>(2 * n));
  for (int i = 0; i < n; ++i) {
    xu[static_cast<size_t>(i)] = x[static_cast<size_t>(i)];
    xu[static_cast<size_t>(n + i)] = u[static_cast<size_t>(i)];
  }
  std::vector<Jet> packed = jet_eval(metric_natural(gen, man), xu, 0);
  std::vector<double> vals(packed.size());
  for (size_t i = 0; i < packed.size(); ++i) vals[i] = packed[i].value();
  return sym_unpack<double>(vals, 2 * n);
}

/// Eigenvalue signature (positive count, negative count).
inline std::pair<int, int> signature_of(const Mat<double>& G, double tol = 1e-10) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(to_eigen(G));
  int pos = 0, neg = 0;
  for (int i = 0; i < es.eigenvalues().size(); ++i) {
    const double e = es.eigenvalues()(i);
    if (e > tol)
      ++pos;
    else if (e < -tol)
      ++neg;
    else
      throw std::domain_error("signature_of: eigenvalue " + std::to_string(e) +
                              " inside the zero band");
  }
  return {pos, neg};
}

}  // namespace tbg
