#include <algorithm>
#include <cmath>
#include <numbers>
#include <vector>

#include <gtest/gtest.h>

#include "tbg/immersions.hpp"
#include "tbg/rng.hpp"
#include "tbg/shapeop.hpp"

namespace tbg {
namespace {

constexpr double kPi = std::numbers::pi;

GNaturalGenerators mixed_poly_generators() {
  return polynomial_generators({{{1.0, 0.0625}, {0.1}, {0.5}, {0.0625}, {}, {0.03125}}},
                               "mixed-poly");
}

// max | del_k G_ij - Gamma^l_ki G_lj - Gamma^l_kj G_il | at one bundle point
double compatibility_residual(const GNaturalGenerators& gen, const ChartedManifold& man,
                              std::span<const double> x, std::span<const double> u) {
  const int d = 2 * man.dim;
  Ten3<double> gamma = tn_christoffel(gen, man, x, u);
  std::vector<double> w(x.begin(), x.end());
  w.insert(w.end(), u.begin(), u.end());
  std::vector<Jet> packed = jet_eval(metric_natural(gen, man), w, 1);

  double worst = 0.0;
  for (int k = 0; k < d; ++k)
    for (int i = 0; i < d; ++i)
      for (int j = 0; j < d; ++j) {
        double r = packed[static_cast<size_t>(sym_index(i, j, d))].d1(k);
        for (int l = 0; l < d; ++l) {
          r -= gamma(l, k, i) * packed[static_cast<size_t>(sym_index(l, j, d))].value();
          r -= gamma(l, k, j) * packed[static_cast<size_t>(sym_index(i, l, d))].value();
        }
        worst = std::max(worst, std::abs(r));
      }
  return worst;
}

TEST(ShapeOp, TnChristoffelEuclideanSasakiVanishes) {
  ChartedManifold r2 = euclidean_space(2);
  Ten3<double> gamma =
      tn_christoffel(sasaki_generators(), r2, std::vector<double>{0.4, -1.1},
                     std::vector<double>{0.8, 0.3});
  for (int r = 0; r < 4; ++r)
    for (int s = 0; s < 4; ++s)
      for (int t = 0; t < 4; ++t) EXPECT_NEAR(gamma(r, s, t), 0.0, 1e-14);
}

TEST(ShapeOp, TnChristoffelMetricCompatibility) {
  struct Setup {
    ChartedManifold man;
    GNaturalGenerators gen;
    int points;
  };
  const Setup setups[] = {
      {round_sphere(2, 1.0), cheeger_gromoll_generators(), 20},
      {round_sphere(2, 1.0), mixed_poly_generators(), 15},
      {euclidean_space(2), mixed_poly_generators(), 15},
  };
  Rng rng(0x90a7ULL);
  for (const Setup& su : setups) {
    double worst = 0.0;
    for (int i = 0; i < su.points; ++i) {
      std::vector<double> x = sample_point(su.man, rng);
      std::vector<double> u(static_cast<size_t>(su.man.dim));
      for (double& c : u) c = rng.uniform(-1.5, 1.5);
      worst = std::max(worst, compatibility_residual(su.gen, su.man, x, u));
    }
    EXPECT_LE(worst, 1e-9) << su.man.name << " + " << su.gen.name;
  }
}

TEST(ShapeOp, TnChristoffelZeroSectionBaseBlock) {
  ChartedManifold s2 = round_sphere(2, 1.0);
  std::vector<double> x{0.8, 1.5}, u{0.0, 0.0};
  Ten3<double> lifted = tn_christoffel(sasaki_generators(), s2, x, u);
  Ten3<double> base = christoffel(s2, x);
  for (int r = 0; r < 2; ++r)
    for (int s = 0; s < 2; ++s)
      for (int t = 0; t < 2; ++t) EXPECT_NEAR(lifted(r, s, t), base(r, s, t), 1e-9);
}

TEST(ShapeOp, TnChristoffelRejectsDegenerateMetric) {
  ChartedManifold s2 = round_sphere(2, 1.0);
  GNaturalGenerators bad = constant_generators({1.0, 1.0, 0.0, 0.0, 0.0, 0.0}, "degenerate-a");
  EXPECT_THROW(tn_christoffel(bad, s2, std::vector<double>{0.8, 1.5},
                              std::vector<double>{0.2, 0.1}),
               ConfigError);
}

TEST(ShapeOp, FrameFieldDerivativesMatchFiniteDifferences) {
  const ImmersionData cases[] = {small_circle_immersion(kPi / 3), saddle_graph_immersion()};
  const double h = 1e-5;
  for (const ImmersionData& imm : cases) {
    SmoothMap ff = lm_frame_field(imm);
    const int dm = 2 * imm.source.dim;
    std::vector<double> w(static_cast<size_t>(dm));
    for (int i = 0; i < dm; ++i) w[static_cast<size_t>(i)] = 0.6 + 0.2 * i;
    std::vector<Jet> jets = jet_eval(ff, w, 1);
    for (int i = 0; i < dm; ++i) {
      std::vector<double> wp = w, wm = w;
      wp[static_cast<size_t>(i)] += h;
      wm[static_cast<size_t>(i)] -= h;
      std::vector<double> fp = point_eval(ff, wp), fm = point_eval(ff, wm);
      for (size_t c = 0; c < fp.size(); ++c)
        EXPECT_NEAR(jets[c].d1(i), (fp[c] - fm[c]) / (2.0 * h), 1e-8) << imm.name;
    }
  }
}

TEST(ShapeOp, SecondFundamentalFormLMLinearSubspace) {
  ImmersionData imm = plane_in_r3_immersion();
  LiftedPoint p =
      lifted_point(imm, std::vector<double>{0.3, -0.7}, std::vector<double>{1.25, 0.5});
  LMSecondFundamentalReport rep = second_fundamental_form_LM(sasaki_generators(), imm, p);
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j)
      for (int r = 0; r < 6; ++r) EXPECT_NEAR(rep.derivative(i, j, r), 0.0, 1e-13);
  EXPECT_LE(rep.max_component, 1e-13);
  EXPECT_LE(rep.symmetry, 1e-13);
  EXPECT_LE(rep.recombination, 1e-12);
}

TEST(ShapeOp, SecondFundamentalFormLMEquatorSasaki) {
  ImmersionData imm = equator_immersion(2, 1.0);
  GNaturalGenerators gen = sasaki_generators();
  Rng rng(0xe95aULL);
  double worst = 0.0, worst_sym = 0.0, worst_rec = 0.0;
  for (int i = 0; i < 20; ++i) {
    std::vector<double> y{rng.uniform(0.2, 6.0)};
    std::vector<double> v{rng.uniform(-2.0, 2.0)};
    LMSecondFundamentalReport rep = second_fundamental_form_LM(gen, imm, lifted_point(imm, y, v));
    worst = std::max(worst, rep.max_component);
    worst_sym = std::max(worst_sym, rep.symmetry);
    worst_rec = std::max(worst_rec, rep.recombination);
  }
  EXPECT_LE(worst, 1e-7);
  EXPECT_LE(worst_sym, 1e-8);
  EXPECT_LE(worst_rec, 1e-9);
}

TEST(ShapeOp, SecondFundamentalFormLMSmallCircleNonzero) {
  ImmersionData imm = small_circle_immersion(kPi / 3);
  LiftedPoint p = lifted_point(imm, std::vector<double>{1.1}, std::vector<double>{1.0});
  LMSecondFundamentalReport rep = second_fundamental_form_LM(sasaki_generators(), imm, p);
  EXPECT_GE(rep.max_component, 0.1);
  EXPECT_LE(rep.symmetry, 1e-8);
  EXPECT_LE(rep.recombination, 1e-9);
}

TEST(ShapeOp, GaussRecombinationAcrossScenarios) {
  struct Setup {
    ImmersionData imm;
    GNaturalGenerators gen;
  };
  const Setup setups[] = {
      {equator_immersion(3, 1.0), cheeger_gromoll_generators()},
      {small_circle_immersion(kPi / 3), sasaki_generators()},
      {small_circle_immersion(kPi / 3), mixed_poly_generators()},
  };
  Rng rng(0x6a55ULL);
  for (const Setup& su : setups) {
    for (int i = 0; i < 3; ++i) {
      std::vector<double> y = sample_point(su.imm.source, rng);
      std::vector<double> v(static_cast<size_t>(su.imm.source.dim));
      for (double& c : v) c = rng.uniform(-1.3, 1.3);
      LMSecondFundamentalReport rep =
          second_fundamental_form_LM(su.gen, su.imm, lifted_point(su.imm, y, v));
      EXPECT_LE(rep.recombination, 1e-9) << su.imm.name << " + " << su.gen.name;
      EXPECT_LE(rep.symmetry, 1e-8) << su.imm.name << " + " << su.gen.name;
    }
  }
}

TEST(ShapeOp, ClosedFormBothSidesZeroOnSpheres) {
  {
    ImmersionData imm = equator_immersion(2, 1.0);
    LiftedPoint p = lifted_point(imm, std::vector<double>{1.3}, std::vector<double>{0.9});
    std::vector<ClosedFormReport> reports = closed_form_report(sasaki_generators(), imm, p);
    ASSERT_EQ(reports.size(), 1u);
    EXPECT_LE(reports[0].max_residual, 1e-7);
    EXPECT_LE(reports[0].max_lhs, 1e-7);
    EXPECT_LE(reports[0].max_rhs, 1e-9);
    // Sasaki has a2 = 0, so every horizontal-horizontal right-hand side is
    // exactly zero, not merely small
    for (const ClosedFormRow& row : reports[0].rows)
      if (row.xi == 'h' && row.slot_x == 'h' && row.slot_y == 'h') {
        EXPECT_EQ(row.rhs, 0.0);
      }
  }
  {
    ImmersionData imm = equator_immersion(3, 1.0);
    LiftedPoint p =
        lifted_point(imm, std::vector<double>{1.2, 0.8}, std::vector<double>{0.7, -0.4});
    for (const ClosedFormReport& rep :
         closed_form_report(cheeger_gromoll_generators(), imm, p)) {
      EXPECT_LE(rep.max_residual, 1e-7);
      EXPECT_LE(rep.max_lhs, 1e-7);
      EXPECT_LE(rep.max_rhs, 1e-9);
    }
  }
}

TEST(ShapeOp, ClosedFormZeroFiberKillsRightHandSides) {
  ImmersionData imm = equator_immersion(2, 1.0);
  LiftedPoint p = lifted_point(imm, std::vector<double>{2.1}, std::vector<double>{0.0});
  std::vector<ClosedFormReport> reports = closed_form_report(sasaki_generators(), imm, p);
  ASSERT_EQ(reports.size(), 1u);
  EXPECT_EQ(reports[0].max_rhs, 0.0);  // linear in u, and u = 0
  EXPECT_LE(reports[0].max_lhs, 1e-9);
}

// totally geodesic axis in a warped product with non-constant curvature:
// the identities still hold with both sides vanishing
TEST(ShapeOp, ClosedFormWarpedAxisNonConstantCurvature) {
  ImmersionData imm = warped_axis_immersion(
      [](const Jet& t) { return 1.0 + t * t; }, "parabolic-warp");
  LiftedPoint p = lifted_point(imm, std::vector<double>{0.8}, std::vector<double>{1.1});

  // sanity: the ambient surface really has non-constant curvature
  double c0 = sectional_curvature(riemann(imm.target, std::vector<double>{0.2, 0.0}),
                                  metric_at(imm.target, std::vector<double>{0.2, 0.0}),
                                  std::vector<double>{1.0, 0.0}, std::vector<double>{0.0, 1.0});
  double c1 = sectional_curvature(riemann(imm.target, std::vector<double>{1.2, 0.0}),
                                  metric_at(imm.target, std::vector<double>{1.2, 0.0}),
                                  std::vector<double>{1.0, 0.0}, std::vector<double>{0.0, 1.0});
  EXPECT_GT(std::abs(c0 - c1), 0.1);

  const GNaturalGenerators gens[] = {sasaki_generators(), mixed_poly_generators()};
  for (const GNaturalGenerators& gen : gens) {
    for (const ClosedFormReport& rep : closed_form_report(gen, imm, p)) {
      EXPECT_LE(rep.max_residual, 1e-7) << gen.name;
      EXPECT_LE(rep.max_lhs, 1e-7) << gen.name;
      EXPECT_LE(rep.max_rhs, 1e-9) << gen.name;
    }
  }
}

TEST(ShapeOp, ClosedFormRejectsCurvedBase) {
  ImmersionData imm = small_circle_immersion(kPi / 3);
  LiftedPoint p = lifted_point(imm, std::vector<double>{1.0}, std::vector<double>{1.0});
  EXPECT_THROW(closed_form_report(sasaki_generators(), imm, p), std::domain_error);
}

TEST(ShapeOp, TheoremEquatorCheegerGromoll) {
  ImmersionData imm = equator_immersion(3, 1.0);
  TheoremGrid grid;
  grid.points = 30;
  TheoremVerdict v = theorem_check(cheeger_gromoll_generators(), imm, grid, 1e-7);
  EXPECT_TRUE(v.base_totally_geodesic);
  EXPECT_TRUE(v.ambient_constant_curvature);
  EXPECT_TRUE(v.lift_totally_geodesic);
  EXPECT_TRUE(v.implication_holds);
  EXPECT_NEAR(v.fitted_c, 1.0, 1e-9);
  EXPECT_LE(v.lift_component_max, 1e-7);
}

TEST(ShapeOp, TheoremPlaneWithRandomConstantGenerators) {
  ImmersionData imm = plane_in_r3_immersion();
  Rng rng(0x9aa7ULL);
  for (int trial = 0; trial < 3; ++trial) {
    GNaturalGenerators gen = constant_generators(
        {rng.uniform(0.5, 1.5), rng.uniform(-0.3, 0.3), rng.uniform(0.0, 1.0), 0.0, 0.0, 0.0},
        "random-const");
    TheoremGrid grid;
    grid.points = 10;
    grid.seed = 0x77ULL + static_cast<std::uint64_t>(trial);
    TheoremVerdict v = theorem_check(gen, imm, grid, 1e-7);
    EXPECT_TRUE(v.base_totally_geodesic);
    EXPECT_TRUE(v.ambient_constant_curvature);
    EXPECT_TRUE(v.lift_totally_geodesic);
    EXPECT_TRUE(v.implication_holds);
    EXPECT_NEAR(v.fitted_c, 0.0, 1e-10);
  }
}

TEST(ShapeOp, TheoremSmallCircleVacuouslyHolds) {
  ImmersionData imm = small_circle_immersion(kPi / 3);
  TheoremGrid grid;
  grid.points = 10;
  TheoremVerdict v = theorem_check(sasaki_generators(), imm, grid, 1e-7);
  EXPECT_FALSE(v.base_totally_geodesic);
  EXPECT_TRUE(v.ambient_constant_curvature);
  EXPECT_FALSE(v.lift_totally_geodesic);
  EXPECT_TRUE(v.implication_holds);
  EXPECT_GE(v.base_h_max, 0.1);
  EXPECT_GE(v.lift_component_max, 0.1);
}

}  // namespace
}  // namespace tbg
