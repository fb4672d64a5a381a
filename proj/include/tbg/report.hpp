#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "tbg/scenario.hpp"
#include "tbg/shapeop.hpp"

namespace tbg {

inline constexpr const char* kToolName = "tbgeo";
inline constexpr const char* kToolVersion = "0.1.0";

/// One named residual (or flag) with enough context to reproduce it: the
/// extremal value, the sample point where it occurred, and the gate it was
/// held against. bound: "upper" (value <= tol), "lower" (value >= tol),
/// "flag" (pass carries the verdict), "info" (reported, never gating).
struct CheckResult {
  std::string name;
  double value = 0.0;
  double mean = 0.0;
  double tol = 0.0;
  std::string bound = "upper";
  bool pass = true;
  std::vector<double> worst_point;
  std::string note;
};

struct SuiteResult {
  std::string name;
  std::vector<CheckResult> checks;
  bool pass = true;
};

struct Report {
  Scenario scenario;
  std::string suite_selector;
  std::vector<SuiteResult> suites;
  bool pass = true;
};

namespace detail {

inline std::string fmt_g(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

/// Running max/mean over a sample plan, remembering where the max happened.
class Stat {
 public:
  void add(double r, const LiftedPoint& p) {
    if (count_ == 0 || r > max_) {
      max_ = r;
      worst_ = source_coords(p);
    }
    sum_ += r;
    ++count_;
  }
  CheckResult as_check(std::string name, double tol) const {
    CheckResult c;
    c.name = std::move(name);
    c.value = max_;
    c.mean = count_ > 0 ? sum_ / count_ : 0.0;
    c.tol = tol;
    c.bound = "upper";
    c.pass = max_ <= tol;
    c.worst_point = worst_;
    return c;
  }
  double max() const { return max_; }

 private:
  double max_ = 0.0, sum_ = 0.0;
  int count_ = 0;
  std::vector<double> worst_;
};

inline CheckResult failed_check(std::string name, const std::string& why) {
  CheckResult c;
  c.name = std::move(name);
  c.bound = "flag";
  c.pass = false;
  c.note = why;
  return c;
}

inline CheckResult info_check(std::string name, double value, std::string note) {
  CheckResult c;
  c.name = std::move(name);
  c.value = value;
  c.bound = "info";
  c.pass = true;
  c.note = std::move(note);
  return c;
}

inline void finish(SuiteResult& s) {
  s.pass = true;
  for (const CheckResult& c : s.checks) s.pass = s.pass && c.pass;
}

inline GeodesicVerdict base_verdict(const ImmersionData& imm,
                                    const std::vector<LiftedPoint>& pts) {
  std::vector<std::vector<double>> ys;
  ys.reserve(pts.size());
  for (const LiftedPoint& p : pts) ys.push_back(p.y);
  return is_totally_geodesic(imm, ys, 1e-8);
}

}  // namespace detail

inline SuiteResult run_metric_suite(const Scenario& sc, const GNaturalGenerators& gen,
                                    const ImmersionData& imm,
                                    const std::vector<LiftedPoint>& pts) {
  SuiteResult out;
  out.name = "metric";

  std::vector<double> ts(101);
  for (int i = 0; i <= 100; ++i) ts[static_cast<size_t>(i)] = sc.t_max * i / 100.0;
  NondegeneracyReport nd = nondegeneracy_check(gen, ts, 1e-8, imm.target.dim);

  CheckResult a_check;
  a_check.name = "generator-a-nonvanishing";
  a_check.value = nd.min_abs_a;
  a_check.tol = nd.floor;
  a_check.bound = "lower";
  a_check.pass = nd.min_abs_a >= nd.floor;
  a_check.note = "min |a| over [0, " + detail::fmt_g(sc.t_max) + "] sits at t = " +
                 detail::fmt_g(nd.argmin_a);
  out.checks.push_back(a_check);

  CheckResult f_check;
  f_check.name = "generator-F-nonvanishing";
  f_check.value = nd.min_abs_F;
  f_check.tol = nd.floor;
  f_check.bound = "lower";
  f_check.pass = nd.dim1_rule || nd.min_abs_F >= nd.floor;
  f_check.note = nd.dim1_rule
                     ? "one-dimensional target: only a(t) decides"
                     : "min |F| over [0, " + detail::fmt_g(sc.t_max) + "] sits at t = " +
                           detail::fmt_g(nd.argmin_F);
  out.checks.push_back(f_check);

  try {
    detail::Stat inv;
    std::vector<std::pair<int, int>> signatures;
    for (const LiftedPoint& p : pts) {
      Mat<double> G = metric_natural_at(gen, imm.target, p.x, p.u);
      Mat<double> GX = G * inverse(G);
      double r = 0.0;
      for (int i = 0; i < GX.rows(); ++i)
        for (int j = 0; j < GX.cols(); ++j)
          r = std::max(r, std::abs(GX(i, j) - (i == j ? 1.0 : 0.0)));
      inv.add(r, p);
      std::pair<int, int> sig = signature_of(G);
      if (std::find(signatures.begin(), signatures.end(), sig) == signatures.end())
        signatures.push_back(sig);
    }
    out.checks.push_back(inv.as_check("bundle-metric-invertible", 1e-9 * sc.tol_scale));
    std::string note;
    for (const auto& [pos, neg] : signatures) {
      if (!note.empty()) note += ", ";
      note += "(" + std::to_string(pos) + "," + std::to_string(neg) + ")";
    }
    out.checks.push_back(detail::info_check("bundle-metric-signature",
                                            static_cast<double>(signatures.size()),
                                            "signature " + note + " across the plan"));
  } catch (const std::exception& e) {
    out.checks.push_back(detail::failed_check("bundle-metric-invertible", e.what()));
  }
  detail::finish(out);
  return out;
}

inline SuiteResult run_lemmas_suite(const Scenario& sc, const GNaturalGenerators&,
                                    const ImmersionData& imm,
                                    const std::vector<LiftedPoint>& pts) {
  SuiteResult out;
  out.name = "lemmas";
  try {
    detail::Stat lift, proj, conn;
    for (const LiftedPoint& p : pts) {
      lift.add(verify_lift_relation(imm, p), p);
      proj.add(verify_projection_lemma(imm, p), p);
      conn.add(verify_connection_lemma(imm, p), p);
    }
    out.checks.push_back(lift.as_check("lift-relation", 1e-9 * sc.tol_scale));
    out.checks.push_back(proj.as_check("bundle-projection", 1e-9 * sc.tol_scale));
    out.checks.push_back(conn.as_check("connection-map", 1e-9 * sc.tol_scale));
  } catch (const std::exception& e) {
    out.checks.push_back(detail::failed_check("lemmas-evaluation", e.what()));
  }
  detail::finish(out);
  return out;
}

inline SuiteResult run_normals_suite(const Scenario& sc, const GNaturalGenerators& gen,
                                     const ImmersionData& imm,
                                     const std::vector<LiftedPoint>& pts) {
  SuiteResult out;
  out.name = "normals";
  const bool per_index = constant_a1_a2(sc);
  try {
    detail::Stat lh, lv, contr, pidx, tmass;
    for (const LiftedPoint& p : pts) {
      NormalConstraintReport rep = verify_normal_constraints(gen, imm, p, per_index);
      lh.add(rep.lemma_h, p);
      lv.add(rep.lemma_v, p);
      contr.add(rep.contraction, p);
      if (per_index) pidx.add(rep.per_index, p);
      tmass.add(rep.tangential_mass, p);
    }
    out.checks.push_back(lh.as_check("normal-horizontal-constraint", 1e-8 * sc.tol_scale));
    out.checks.push_back(lv.as_check("normal-vertical-constraint", 1e-8 * sc.tol_scale));
    out.checks.push_back(contr.as_check("normal-contraction", 1e-8 * sc.tol_scale));
    if (per_index)
      out.checks.push_back(pidx.as_check("normal-per-index", 1e-8 * sc.tol_scale));
    GeodesicVerdict gv = detail::base_verdict(imm, pts);
    if (gv.totally_geodesic) {
      CheckResult c = tmass.as_check("normal-tangential-mass", 1e-8 * sc.tol_scale);
      c.note = "totally geodesic base: tangential parts must vanish";
      out.checks.push_back(c);
    } else {
      out.checks.push_back(detail::info_check(
          "normal-tangential-mass", tmass.max(),
          "base not totally geodesic (max |h| = " + detail::fmt_g(gv.max_residual) +
              "): tangential parts are expected"));
    }
  } catch (const std::exception& e) {
    out.checks.push_back(detail::failed_check("normals-evaluation", e.what()));
  }
  detail::finish(out);
  return out;
}

inline SuiteResult run_frames_suite(const Scenario& sc, const GNaturalGenerators& gen,
                                    const ImmersionData& imm,
                                    const std::vector<LiftedPoint>& pts) {
  SuiteResult out;
  out.name = "frames";
  try {
    GeodesicVerdict gv = detail::base_verdict(imm, pts);
    if (!gv.totally_geodesic) {
      out.checks.push_back(detail::info_check(
          "frame-preconditions", gv.max_residual,
          "skipped: base not totally geodesic (max |h| = " + detail::fmt_g(gv.max_residual) + ")"));
      detail::finish(out);
      return out;
    }

    const int k = imm.target.dim - imm.source.dim;
    detail::Stat gram, ortho;
    std::vector<int> cases;
    for (const LiftedPoint& p : pts) {
      TotgNormalFrame f = normal_frame_totg(gen, imm, p);
      if (std::find(cases.begin(), cases.end(), f.case_id) == cases.end())
        cases.push_back(f.case_id);
      double rg = 0.0;
      for (int x = 0; x < k; ++x)
        for (int z = 0; z < k; ++z) {
          const double del = x == z ? 1.0 : 0.0;
          rg = std::max(rg, std::abs(f.gram(x, z) - f.c_ss * del));
          rg = std::max(rg, std::abs(f.gram(k + x, k + z) - f.c_tt * del));
          rg = std::max(rg, std::abs(f.gram(x, k + z)));
        }
      gram.add(rg, p);

      Mat<double> T = lifted_tangent_frame(imm, p);
      Mat<double> G = metric_natural_at(gen, imm.target, p.x, p.u);
      const int dn = 2 * imm.target.dim;
      double ro = 0.0;
      for (int x = 0; x < 2 * k; ++x)
        for (int ct = 0; ct < T.cols(); ++ct) {
          double acc = 0.0;
          for (int r = 0; r < dn; ++r)
            for (int s = 0; s < dn; ++s) {
              const double nx = x < k ? f.S(r, x) : f.T(r, x - k);
              acc += nx * G(r, s) * T(s, ct);
            }
          ro = std::max(ro, std::abs(acc));
        }
      ortho.add(ro, p);
    }
    out.checks.push_back(gram.as_check("frame-gram-relations", 1e-10 * sc.tol_scale));
    out.checks.push_back(ortho.as_check("frame-tangent-orthogonality", 1e-9 * sc.tol_scale));
    std::string note = "case";
    for (int c : cases) note += " " + std::to_string(c);
    out.checks.push_back(
        detail::info_check("frame-case", static_cast<double>(cases.size()), note));
  } catch (const std::exception& e) {
    out.checks.push_back(detail::failed_check("frame-construction", e.what()));
  }
  detail::finish(out);
  return out;
}

inline SuiteResult run_shape_suite(const Scenario& sc, const GNaturalGenerators& gen,
                                   const ImmersionData& imm,
                                   const std::vector<LiftedPoint>& pts) {
  SuiteResult out;
  out.name = "shape";
  try {
    detail::Stat sym, rec, hmax;
    for (const LiftedPoint& p : pts) {
      LMSecondFundamentalReport rep = second_fundamental_form_LM(gen, imm, p);
      sym.add(rep.symmetry, p);
      rec.add(rep.recombination, p);
      hmax.add(rep.max_component, p);
    }
    out.checks.push_back(sym.as_check("lift-h-symmetry", 1e-8 * sc.tol_scale));
    out.checks.push_back(rec.as_check("gauss-recombination", 1e-9 * sc.tol_scale));
    CheckResult h = hmax.as_check("lift-h-max", 0.0);
    h.bound = "info";
    h.pass = true;
    h.note = "gated by the theorem suite, recorded here";
    out.checks.push_back(h);

    GeodesicVerdict gv = detail::base_verdict(imm, pts);
    if (gv.totally_geodesic) {
      detail::Stat res, both;
      for (const LiftedPoint& p : pts)
        for (const ClosedFormReport& rep : closed_form_report(gen, imm, p)) {
          res.add(rep.max_residual, p);
          both.add(std::max(rep.max_lhs, rep.max_rhs), p);
        }
      out.checks.push_back(res.as_check("closed-form-residual", 1e-7 * sc.tol_scale));
      out.checks.push_back(both.as_check("closed-form-both-sides-zero", 1e-7 * sc.tol_scale));
    } else {
      out.checks.push_back(detail::info_check(
          "closed-form-residual", 0.0,
          "skipped: base not totally geodesic (max |h| = " + detail::fmt_g(gv.max_residual) + ")"));
    }
  } catch (const std::exception& e) {
    out.checks.push_back(detail::failed_check("shape-evaluation", e.what()));
  }
  detail::finish(out);
  return out;
}

inline SuiteResult run_theorem_suite(const Scenario& sc, const GNaturalGenerators& gen,
                                     const ImmersionData& imm,
                                     const std::vector<LiftedPoint>&) {
  SuiteResult out;
  out.name = "theorem";
  try {
    TheoremGrid grid;
    grid.points = sc.grid.points;
    grid.fiber_bound = sc.grid.fiber_bound;
    grid.seed = sc.grid.seed;
    TheoremVerdict v = theorem_check(gen, imm, grid, 1e-7 * sc.tol_scale);

    out.checks.push_back(detail::info_check(
        "hypothesis-base-totally-geodesic", v.base_h_max,
        std::string(v.base_totally_geodesic ? "holds" : "fails") + " at tol " +
            detail::fmt_g(v.tol)));
    out.checks.push_back(detail::info_check(
        "hypothesis-constant-curvature", v.curvature_residual,
        std::string(v.ambient_constant_curvature ? "holds" : "fails") + ", fitted c = " +
            detail::fmt_g(v.fitted_c)));
    out.checks.push_back(detail::info_check(
        "conclusion-lift-totally-geodesic", v.lift_component_max,
        std::string(v.lift_totally_geodesic ? "holds" : "fails") + " at tol " +
            detail::fmt_g(v.tol)));

    CheckResult imp;
    imp.name = "theorem-implication";
    imp.bound = "flag";
    imp.pass = v.implication_holds;
    imp.value = v.lift_component_max;
    imp.note = std::string("(") + (v.base_totally_geodesic ? "true" : "false") + ", " +
               (v.ambient_constant_curvature ? "true" : "false") + ", " +
               (v.lift_totally_geodesic ? "true" : "false") + ")";
    out.checks.push_back(imp);
  } catch (const std::exception& e) {
    out.checks.push_back(detail::failed_check("theorem-evaluation", e.what()));
  }
  detail::finish(out);
  return out;
}

inline const std::vector<std::string>& suite_names() {
  static const std::vector<std::string> names = {"metric", "lemmas", "normals",
                                                 "frames", "shape",  "theorem"};
  return names;
}

inline Report run_suites(const Scenario& sc, const std::string& selector) {
  std::vector<std::string> wanted;
  if (selector == "all") {
    wanted = suite_names();
  } else if (std::find(suite_names().begin(), suite_names().end(), selector) !=
             suite_names().end()) {
    wanted = {selector};
  } else {
    throw ConfigError("unknown suite '" + selector + "'");
  }

  Report rep;
  rep.scenario = sc;
  rep.suite_selector = selector;
  GNaturalGenerators gen = make_generators(sc);
  ImmersionData imm = make_immersion(sc);
  std::vector<LiftedPoint> pts = sample_plan(imm, sc.grid);

  for (const std::string& name : wanted) {
    if (name == "metric") rep.suites.push_back(run_metric_suite(sc, gen, imm, pts));
    if (name == "lemmas") rep.suites.push_back(run_lemmas_suite(sc, gen, imm, pts));
    if (name == "normals") rep.suites.push_back(run_normals_suite(sc, gen, imm, pts));
    if (name == "frames") rep.suites.push_back(run_frames_suite(sc, gen, imm, pts));
    if (name == "shape") rep.suites.push_back(run_shape_suite(sc, gen, imm, pts));
    if (name == "theorem") rep.suites.push_back(run_theorem_suite(sc, gen, imm, pts));
  }
  rep.pass = true;
  for (const SuiteResult& s : rep.suites) rep.pass = rep.pass && s.pass;
  return rep;
}

inline nlohmann::ordered_json to_json(const Scenario& sc) {
  nlohmann::ordered_json j;
  j["name"] = sc.name;
  j["target"] = {{"preset", sc.target_preset},
                 {"dim", sc.target_dim},
                 {"radius", sc.radius},
                 {"warp", sc.warp}};
  j["immersion"] = {{"preset", sc.immersion_preset},
                    {"theta0", sc.theta0},
                    {"source-dim", sc.source_dim}};
  nlohmann::ordered_json gens;
  gens["preset"] = sc.generator_preset;
  gens["t-max"] = sc.t_max;
  const char* keys[6] = {"a1", "a2", "a3", "b1", "b2", "b3"};
  for (int i = 0; i < 6; ++i)
    if (!sc.coeffs[static_cast<size_t>(i)].empty()) gens[keys[i]] = sc.coeffs[static_cast<size_t>(i)];
  j["generators"] = gens;
  j["grid"] = {{"points", sc.grid.points},
               {"fiber-bound", sc.grid.fiber_bound},
               {"seed", sc.grid.seed}};
  j["tol-scale"] = sc.tol_scale;
  return j;
}

inline nlohmann::ordered_json to_json(const Report& rep) {
  nlohmann::ordered_json j;
  j["tool"] = kToolName;
  j["version"] = kToolVersion;
  j["convention"] = "curvature sign: R(X,Y,X,Y) > 0 on round spheres";
  j["note"] = "generator nondegeneracy certified on [0, t-max] only";
  j["scenario"] = to_json(rep.scenario);
  j["suite-selector"] = rep.suite_selector;
  nlohmann::ordered_json suites = nlohmann::ordered_json::array();
  for (const SuiteResult& s : rep.suites) {
    nlohmann::ordered_json js;
    js["name"] = s.name;
    nlohmann::ordered_json checks = nlohmann::ordered_json::array();
    for (const CheckResult& c : s.checks) {
      nlohmann::ordered_json jc;
      jc["name"] = c.name;
      jc["value"] = c.value;
      jc["mean"] = c.mean;
      jc["tol"] = c.tol;
      jc["bound"] = c.bound;
      jc["pass"] = c.pass;
      if (!c.worst_point.empty()) jc["worst-point"] = c.worst_point;
      if (!c.note.empty()) jc["note"] = c.note;
      checks.push_back(jc);
    }
    js["checks"] = checks;
    js["pass"] = s.pass;
    suites.push_back(js);
  }
  j["suites"] = suites;
  j["pass"] = rep.pass;
  return j;
}

inline std::string render_json(const Report& rep) { return to_json(rep).dump(2) + "\n"; }

inline std::string render_text(const Report& rep) {
  std::string out;
  out += std::string(kToolName) + " " + kToolVersion + "  scenario: " + rep.scenario.name + "\n";
  out += "note: generator nondegeneracy certified on [0, t-max] only\n";
  char buf[200];
  for (const SuiteResult& s : rep.suites) {
    out += "\n[" + s.name + "]\n";
    for (const CheckResult& c : s.checks) {
      const char* verdict = c.bound == "info" ? "INFO" : (c.pass ? "PASS" : "FAIL");
      if (c.bound == "info" || c.bound == "flag")
        std::snprintf(buf, sizeof buf, "  %-34s %12.5e              %s\n", c.name.c_str(),
                      c.value, verdict);
      else
        std::snprintf(buf, sizeof buf, "  %-34s %12.5e  tol %8.1e  %s\n", c.name.c_str(), c.value,
                      c.tol, verdict);
      out += buf;
      if (!c.note.empty()) out += "      " + c.note + "\n";
    }
    out += s.pass ? "  suite: pass\n" : "  suite: FAIL\n";
  }
  out += rep.pass ? "\nresult: pass\n" : "\nresult: FAIL\n";
  return out;
}

/// CSV table of the derived generator scalars on a uniform t grid.
inline std::string scalars_csv(const GNaturalGenerators& gen, double t_min, double t_max,
                               int steps) {
  if (steps < 1) throw ConfigError("scalars: steps must be at least 1");
  if (t_max < t_min) throw ConfigError("scalars: empty range (t-max < t-min)");
  std::string out = "t,a1,a2,a3,b1,b2,b3,A,B,F1,F2,F3,a,F\n";
  char buf[600];
  for (int i = 0; i < steps; ++i) {
    const double t =
        steps == 1 ? t_min : t_min + (t_max - t_min) * static_cast<double>(i) / (steps - 1);
    GNaturalScalars s = scalars_at(gen, t);
    std::snprintf(buf, sizeof buf,
                  "%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,"
                  "%.17g\n",
                  s.t, s.a1, s.a2, s.a3, s.b1, s.b2, s.b3, s.A, s.B, s.F1, s.F2, s.F3, s.a, s.F);
    out += buf;
  }
  return out;
}

}  // namespace tbg
