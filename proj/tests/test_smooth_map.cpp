#include "tbg/smooth_map.hpp"

#include <cmath>
#include <numbers>
#include <vector>

#include <gtest/gtest.h>

#include "tbg/rng.hpp"
#include "testutil.hpp"

using tbg::compose;
using tbg::jacobian;
using tbg::Jet;
using tbg::jet_eval;
using tbg::Rng;
using tbg::SmoothMap;

namespace {

SmoothMap square_map() {
  return SmoothMap(1, 1, [](std::span<const Jet> in) {
    return std::vector<Jet>{in[0] * in[0]};
  });
}

TEST(SmoothMap, JetEvalSquare) {
  auto out = jet_eval(square_map(), std::vector<double>{3.0}, 2);
  ASSERT_EQ(out.size(), 1u);
  EXPECT_DOUBLE_EQ(out[0].value(), 9.0);
  EXPECT_DOUBLE_EQ(out[0].d1(0), 6.0);
  EXPECT_DOUBLE_EQ(out[0].d2(0, 0), 2.0);
}

TEST(SmoothMap, JetEvalSinThetaOfTwoVariables) {
  SmoothMap m(2, 1, [](std::span<const Jet> in) { return std::vector<Jet>{sin(in[0])}; });
  auto out = jet_eval(m, std::vector<double>{std::numbers::pi / 2, 0.0}, 1);
  EXPECT_DOUBLE_EQ(out[0].value(), 1.0);
  EXPECT_NEAR(out[0].d1(0), 0.0, 1e-16);
  EXPECT_DOUBLE_EQ(out[0].d1(1), 0.0);
}

TEST(SmoothMap, JetEvalRationalThirdOrder) {
  SmoothMap m(1, 1, [](std::span<const Jet> in) {
    return std::vector<Jet>{1.0 / (1.0 + in[0])};
  });
  auto out = jet_eval(m, std::vector<double>{1.0}, 3);
  EXPECT_NEAR(out[0].value(), 0.5, 1e-15);
  EXPECT_NEAR(out[0].d1(0), -0.25, 1e-15);
  EXPECT_NEAR(out[0].d2(0, 0), 0.25, 1e-15);
  EXPECT_NEAR(out[0].d3(0, 0, 0), -0.375, 1e-15);
}

TEST(SmoothMap, OrderZeroEqualsPointMap) {
  SmoothMap m(2, 2, [](std::span<const Jet> in) {
    return std::vector<Jet>{exp(in[0]) * sin(in[1]), in[0] * in[1]};
  });
  const std::vector<double> p = {0.3, 1.1};
  auto vals = tbg::point_eval(m, p);
  EXPECT_DOUBLE_EQ(vals[0], std::exp(0.3) * std::sin(1.1));
  EXPECT_DOUBLE_EQ(vals[1], 0.3 * 1.1);
}

TEST(SmoothMap, TruncationConsistency) {
  SmoothMap m(2, 1, [](std::span<const Jet> in) {
    return std::vector<Jet>{exp(in[0] * in[1]) + sin(in[0]) / cosh(in[1])};
  });
  const std::vector<double> p = {0.4, 1.2};
  for (int order = 1; order <= 3; ++order) {
    auto hi = jet_eval(m, p, order);
    auto lo = jet_eval(m, p, order - 1);
    Jet t = hi[0].truncated(order - 1);
    EXPECT_DOUBLE_EQ(t.value(), lo[0].value());
    if (order - 1 >= 1) {
      for (int i = 0; i < 2; ++i) EXPECT_DOUBLE_EQ(t.d1(i), lo[0].d1(i));
    }
    if (order - 1 >= 2) {
      for (int i = 0; i < 2; ++i)
        for (int j = i; j < 2; ++j) EXPECT_DOUBLE_EQ(t.d2(i, j), lo[0].d2(i, j));
    }
  }
}

TEST(SmoothMap, JacobianIdentity) {
  auto J = jacobian(SmoothMap::identity(3), std::vector<double>{4.0, -1.0, 0.5});
  EXPECT_TRUE(J.isApprox(Eigen::MatrixXd::Identity(3, 3)));
}

TEST(SmoothMap, JacobianEquatorInclusion) {
  SmoothMap equator(1, 2, [](std::span<const Jet> in) {
    return std::vector<Jet>{tbg::Jet::constant(std::numbers::pi / 2, 1, in[0].order()), in[0]};
  });
  auto J = jacobian(equator, std::vector<double>{0.7});
  ASSERT_EQ(J.rows(), 2);
  ASSERT_EQ(J.cols(), 1);
  EXPECT_DOUBLE_EQ(J(0, 0), 0.0);
  EXPECT_DOUBLE_EQ(J(1, 0), 1.0);
}

TEST(SmoothMap, JacobianGraphImmersion) {
  SmoothMap graph(2, 3, [](std::span<const Jet> in) {
    return std::vector<Jet>{in[0], in[1], in[0] * in[1]};
  });
  auto J = jacobian(graph, std::vector<double>{1.0, 2.0});
  EXPECT_DOUBLE_EQ(J(2, 0), 2.0);
  EXPECT_DOUBLE_EQ(J(2, 1), 1.0);
}

TEST(SmoothMap, DegenerateImmersionDetected) {
  SmoothMap cusp(1, 2,
                 [](std::span<const Jet> in) {
                   return std::vector<Jet>{in[0] * in[0], in[0] * in[0] * in[0]};
                 },
                 Jet::kMaxOrder, 1);
  EXPECT_NO_THROW(jacobian(cusp, std::vector<double>{0.5}));
  EXPECT_THROW(jacobian(cusp, std::vector<double>{0.0}), std::domain_error);
}

Jet random_poly2(const Jet& u, const Jet& v, Rng& rng) {
  Jet r = Jet::constant(rng.uniform(-2, 2), u.nvars(), u.order());
  const Jet terms[] = {u,         v,         u * u, u * v, v * v,
                       u * u * u, u * u * v, u * v * v, v * v * v};
  for (const Jet& t : terms) r += rng.uniform(-2, 2) * t;
  return r;
}

// jet_eval(g after f) equals the Taylor composition of jet_eval(g) with
// jet_eval(f), exactly to machine rounding, on random polynomial pairs.
TEST(SmoothMap, ChainRuleOnRandomPolynomialPairs) {
  Rng rng(0xc0ffeeu);
  for (int trial = 0; trial < 50; ++trial) {
    const auto f_seed = rng.next_u64();
    const auto g_seed = rng.next_u64();
    SmoothMap f(2, 2, [f_seed](std::span<const Jet> in) {
      Rng r(f_seed);
      return std::vector<Jet>{random_poly2(in[0], in[1], r), random_poly2(in[0], in[1], r)};
    });
    SmoothMap g(2, 1, [g_seed](std::span<const Jet> in) {
      Rng r(g_seed);
      return std::vector<Jet>{random_poly2(in[0], in[1], r)};
    });

    const std::vector<double> p = {rng.uniform(-1.5, 1.5), rng.uniform(-1.5, 1.5)};
    auto chained = jet_eval(compose(g, f), p, 3);

    auto fj = jet_eval(f, p, 3);
    const std::vector<double> fp = {fj[0].value(), fj[1].value()};
    auto gj = jet_eval(g, fp, 3);
    Jet expect = tbg::compose(gj[0], fj);

    const double tol = 1e-11 * std::max(1.0, std::abs(expect.value()));
    EXPECT_NEAR(chained[0].value(), expect.value(), tol);
    for (int i = 0; i < 2; ++i) {
      EXPECT_NEAR(chained[0].d1(i), expect.d1(i), 50 * tol);
      for (int j = i; j < 2; ++j) {
        EXPECT_NEAR(chained[0].d2(i, j), expect.d2(i, j), 50 * tol);
        for (int k = j; k < 2; ++k)
          EXPECT_NEAR(chained[0].d3(i, j, k), expect.d3(i, j, k), 50 * tol);
      }
    }
  }
}

// A map rebuilt from its pointwise Taylor data must behave exactly like the
// original, including when fed the output jets of another map.
TEST(SmoothMap, PointwiseTaylorRuleMatchesDirectEvaluator) {
  SmoothMap direct(2, 1, [](std::span<const Jet> in) {
    return std::vector<Jet>{sin(in[0]) * in[1] + exp(in[0] * in[1])};
  });
  SmoothMap rebuilt = SmoothMap::from_pointwise_jets(
      2, 1, [&direct](std::span<const double> p, int order) { return jet_eval(direct, p, order); });

  Rng rng(0x5eedu);
  for (int trial = 0; trial < 20; ++trial) {
    const std::vector<double> p = {rng.uniform(-1, 1), rng.uniform(-1, 1)};
    for (int order = 0; order <= 3; ++order) {
      auto a = jet_eval(direct, p, order);
      auto b = jet_eval(rebuilt, p, order);
      EXPECT_NEAR(a[0].value(), b[0].value(), 1e-13);
      if (order >= 1) {
        for (int i = 0; i < 2; ++i) EXPECT_NEAR(a[0].d1(i), b[0].d1(i), 1e-13);
      }
      if (order >= 2) {
        for (int i = 0; i < 2; ++i)
          for (int j = i; j < 2; ++j) EXPECT_NEAR(a[0].d2(i, j), b[0].d2(i, j), 1e-12);
      }
      if (order >= 3) {
        for (int i = 0; i < 2; ++i)
          for (int j = i; j < 2; ++j)
            for (int k = j; k < 2; ++k) EXPECT_NEAR(a[0].d3(i, j, k), b[0].d3(i, j, k), 1e-12);
      }
    }
  }

  // Chained behind another map the two must still agree: this is what lets
  // derived fields built from pointwise jets act as honest smooth maps.
  SmoothMap inner(2, 2, [](std::span<const Jet> in) {
    return std::vector<Jet>{in[0] * in[1], in[0] - in[1]};
  });
  const std::vector<double> q = {0.6, -0.4};
  auto a = jet_eval(compose(direct, inner), q, 3);
  auto b = jet_eval(compose(rebuilt, inner), q, 3);
  EXPECT_NEAR(a[0].value(), b[0].value(), 1e-13);
  for (int i = 0; i < 2; ++i)
    for (int j = i; j < 2; ++j)
      for (int k = j; k < 2; ++k) EXPECT_NEAR(a[0].d3(i, j, k), b[0].d3(i, j, k), 1e-11);
}

TEST(SmoothMap, ErrorPaths) {
  SmoothMap m = square_map();
  EXPECT_THROW(jet_eval(m, std::vector<double>{1.0, 2.0}, 1), std::invalid_argument);
  EXPECT_THROW(jet_eval(m, std::vector<double>{1.0}, 4), std::invalid_argument);
  EXPECT_THROW(jet_eval(m, std::vector<double>{1.0}, -1), std::invalid_argument);

  SmoothMap pole(1, 1, [](std::span<const Jet> in) { return std::vector<Jet>{1.0 / in[0]}; });
  try {
    jet_eval(pole, std::vector<double>{0.0}, 1);
    FAIL() << "expected domain_error";
  } catch (const std::domain_error& e) {
    EXPECT_NE(std::string(e.what()).find("(0)"), std::string::npos)
        << "pole report should name the offending coordinate: " << e.what();
  }

  SmoothMap low_order(1, 1, [](std::span<const Jet> in) { return std::vector<Jet>{in[0]}; }, 1);
  EXPECT_THROW(jet_eval(low_order, std::vector<double>{1.0}, 2), std::invalid_argument);

  EXPECT_THROW(compose(square_map(), SmoothMap::identity(2)), std::invalid_argument);
}

}  // namespace
