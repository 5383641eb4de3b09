#include <gtest/gtest.h>

#include <cmath>

#include "nchf/error.hpp"
#include "nchf/fixtures.hpp"
#include "nchf/operators.hpp"
#include "nchf/runner.hpp"
#include "nchf/sphere.hpp"
#include "support.hpp"

using namespace nchf;

TEST(Project, Examples) {
  EXPECT_EQ(project(std::vector<double>{2, 0, 0}), (std::vector<double>{1, 0, 0}));
  const auto p = project(std::vector<double>{0.6 * 1.25, 0.8 * 1.25});
  EXPECT_NEAR(p[0], 0.6, 1e-16);
  EXPECT_NEAR(p[1], 0.8, 1e-16);
  const std::vector<double> u{0.6, 0.8};
  const auto q = project(u);
  EXPECT_NEAR(q[0], 0.6, 1e-16);
  EXPECT_NEAR(q[1], 0.8, 1e-16);
}

TEST(Project, GuardTrips) {
  try {
    project(std::vector<double>{0.05, 0.05, 0.0});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::kStepTooLarge);
    EXPECT_NE(std::string(e.what()).find("left tubular neighborhood"), std::string::npos);
  }
  EXPECT_THROW(project(std::vector<double>{0.1, 0.0}), Error);
}

TEST(Project, IdempotentToOneRounding) {
  PortableRng rng(77);
  for (int k = 0; k < 1000; ++k) {
    std::vector<double> y(4);
    for (double& x : y) x = 3.0 * rng.normal();
    double s = 0;
    for (double x : y) s += x * x;
    if (s < 0.05) continue;
    const auto p = project(y);
    const auto pp = project(p);
    for (std::size_t a = 0; a < y.size(); ++a) ASSERT_NEAR(pp[a], p[a], 2.3e-16);
  }
}

TEST(TangentialProject, Examples) {
  EXPECT_EQ(tangential_project(std::vector<double>{1, 1}, std::vector<double>{1, 0}),
            (std::vector<double>{0, 1}));
  const auto z = tangential_project(std::vector<double>{0, 3, 0}, std::vector<double>{0, 1, 0});
  for (double x : z) EXPECT_EQ(x, 0.0);
  EXPECT_EQ(tangential_project(std::vector<double>{0, 2, 5}, std::vector<double>{1, 0, 0}),
            (std::vector<double>{0, 2, 5}));
}

TEST(FlowConstants, Cb) {
  FlowConstants k{3, 1.0, 2.5, 0.1, 1.0};
  EXPECT_EQ(k.c_b(), 3 * 2.5 / 2.0 - 1.0 - 2.0);
  k.curvature_bound = 0.5;
  EXPECT_EQ(k.c_b(), 3 * 2.5 / 2.0 - 0.5 - 2.0 * 0.25);
}

TEST(FlowConstants, RejectsSmallB) {
  for (int n : {2, 3, 4}) {
    FlowConstants k{n, 1.0, 6.0 / n * 0.99, 0.1, 1.0};
    try {
      k.validate();
      FAIL();
    } catch (const Error& e) {
      EXPECT_EQ(e.kind(), ErrorKind::kConfig);
      EXPECT_NE(std::string(e.what()).find("C_b"), std::string::npos) << e.what();
    }
    k.b = 6.0 / n * 1.01;
    EXPECT_NO_THROW(k.validate());
  }
}

TEST(SecondFundamentalForm, ConstantMapVanishes) {
  const GridSpec g(3, 8);
  const MapField f = make_fixture(g, 4, FixtureSpec{});
  const FaceField sigma = face_weights(energy_density(f, 0.1), 3);
  for (double x : second_fundamental_form_term(f, sigma, face_normal_sq(f)).values()) EXPECT_EQ(x, 0.0);
}

TEST(SecondFundamentalForm, CircleMapCancelsLaplacian) {
  const GridSpec g(3, 32);
  const double h = g.spacing();
  const MapField f = make_fixture(g, 3, FixtureSpec{FixtureKind::kGreatCircle});
  const FaceField sigma = face_weights(energy_density(f, 0.1), 3);
  const MapField A = second_fundamental_form_term(f, sigma, face_normal_sq(f));
  for (std::size_t c = 0; c < g.cell_count(); c += 7) {
    for (std::size_t a = 0; a < 3; ++a) ASSERT_NEAR(A.at(c)[a], std::sqrt(1.1) * f.at(c)[a], 2 * h * h);
  }
  FlowConstants k{3, 1.0, 8.0 / 3, 0.1, 1.0};
  EXPECT_LE(nchf::testing::max_abs(tension(f, k).values()), 1e-12);
}

TEST(SecondFundamentalForm, N2IsDfSquaredF) {
  const GridSpec g(2, 16);
  const MapField f = nchf::testing::rough_map(g, 3, 2);
  const FaceField fs = face_normal_sq(f);
  const FaceField sigma = face_weights(energy_density(f, 0.1), 2);
  const MapField A = second_fundamental_form_term(f, sigma, fs);
  const ScalarField df2 = cell_gradient_sq(fs);
  for (std::size_t c = 0; c < g.cell_count(); ++c) {
    for (std::size_t a = 0; a < 3; ++a) ASSERT_NEAR(A.at(c)[a], df2[c] * f.at(c)[a], 1e-12 * (1 + df2[c]));
  }
}

TEST(Tension, ConstantMapIsZero) {
  const GridSpec g(2, 8);
  for (double x : tension(make_fixture(g, 3, FixtureSpec{}), FlowConstants{}).values()) EXPECT_EQ(x, 0.0);
}

TEST(Tension, TangentialOnRoughMaps) {
  for (const auto& g : nchf::testing::small_grids()) {
    for (std::uint64_t seed = 1; seed <= 3; ++seed) {
      const MapField f = nchf::testing::rough_map(g, 3, seed);
      FlowConstants k{g.dim(), 1.0, 8.0 / g.dim(), 0.1, 1.0};
      EXPECT_LE(tangency_residual(tension(f, k), f), 1e-8);
      EXPECT_LE(tangency_residual(tension(f, k), f), 1e-13);
    }
  }
}

TEST(Tension, RejectsOffSphereInput) {
  const GridSpec g(2, 8);
  MapField f = make_fixture(g, 3, FixtureSpec{});
  f.at(3)[2] = 1.001;
  EXPECT_THROW(tension(f, FlowConstants{}), Error);
}

TEST(Tension, IsMinusEnergyGradient) {
  for (int n : {2, 3, 4}) {
    const GridSpec g(n, n == 4 ? 8 : 16);
    FixtureSpec spec{FixtureKind::kRandomBandlimited};
    spec.max_freq = 2;
    const MapField f = make_fixture(g, 3, spec);
    const GradcheckReport rep = gradcheck(f, FlowConstants{n, 1.0, 8.0 / n, 0.1, 1.0}, 6, 1e-5, 5);
    EXPECT_TRUE(rep.pass) << "n = " << n;
    // Some directions are orthogonal to the gradient by symmetry; the check
    // is only meaningful if most are not.
    int live = 0;
    for (const auto& r : rep.rows) live += std::abs(r.analytic) > 1e-6 ? 1 : 0;
    EXPECT_GE(live, 4) << "n = " << n;
  }
}

// Flipping the sign of the curvature term breaks both tangency and the gradient identity.
TEST(Tension, SignFixedByGradient) {
  const GridSpec g(2, 16);
  FixtureSpec spec{FixtureKind::kRandomBandlimited};
  const MapField f = make_fixture(g, 3, spec);
  const FlowConstants k{2, 1.0, 4.0, 0.1, 1.0};
  const MapField lap = n_laplacian_reg(f, k.eps, 2);
  const FaceField sigma = face_weights(energy_density(f, k.eps), 2);
  const MapField A = second_fundamental_form_term(f, sigma, face_normal_sq(f));
  MapField wrong(g, 3);
  for (std::size_t i = 0; i < wrong.values().size(); ++i) wrong.values()[i] = lap.values()[i] - A.values()[i];
  EXPECT_GT(tangency_residual(wrong, f), 0.1);
}
