#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <vector>

#include "sympb/linear_evolution.hpp"
#include "test_support.hpp"

using namespace sympb;
using sympb::testing::rel_diff;

namespace {

  constexpr double pi = std::numbers::pi;

  QuadraticSaddleModel two_dof() { return quadratic_part(builtin_eckart_morse_2dof()); }
  QuadraticSaddleModel three_dof() { return quadratic_part(builtin_eckart_morse_morse_3dof()); }

  // Shadow of {z^T M z <= 1} on the (Q1, P1) plane is the ellipse whose matrix is the inverse of the (Q1, P1) block
  // of M^{-1}, so its area is pi sqrt(det) of that block.
  double shadow_area_oracle(Matrix const& m, Eigen::Index n) {
    Matrix cov = m.inverse();
    Eigen::Matrix2d block;
    block << cov(0, 0), cov(0, n), cov(n, 0), cov(n, n);
    return pi * std::sqrt(block.determinant());
  }

}  // namespace

TEST(Stm, IdentityAtZero) {
  EXPECT_EQ(stm(two_dof(), 0.0), Matrix::Identity(4, 4));
  EXPECT_EQ(stm(three_dof(), 0.0), Matrix::Identity(6, 6));
}

TEST(Stm, SymplecticAndGroupProperty) {
  // Entries of Phi^T J Phi cancel terms of size cosh^2, so the defect is measured relative to that scale.
  auto m = three_dof();
  for (double t : {-13.0, -2.5, 0.3, 1.0, 7.0, 13.6}) {
    ASSERT_LE(std::abs(m.lambda * t), 10.0);
    double scale = std::pow(std::cosh(m.lambda * t), 2);
    EXPECT_LE(symplecticity_defect(stm(m, t)), 1e-12 * scale) << "t " << t;
    EXPECT_LE(max_abs(stm(m, t) * stm(m, -t) - Matrix::Identity(6, 6)), 1e-12 * scale) << "t " << t;
  }
  Matrix a = stm(m, 0.7) * stm(m, 1.1);
  EXPECT_LE(max_abs(a - stm(m, 1.8)), 1e-12);
}

TEST(Stm, SymplecticToTightToleranceOnModerateTimes) {
  auto m = two_dof();
  for (double t : {0.1, 1.0, 3.0}) {
    EXPECT_TRUE(is_symplectic(stm(m, t), 1e-12));
    EXPECT_LE(max_abs(stm(m, t) * stm(m, -t) - Matrix::Identity(4, 4)), 1e-12);
  }
}

TEST(Stm, SolvesTheLinearFlow) {
  // dz/dt = J H z with H = diag(-lambda, omega, lambda, omega) in (Q1, q2, P1, p2); compare with exp(t J H).
  auto m = two_dof();
  Matrix h = Matrix::Zero(4, 4);
  h(0, 0) = -m.lambda;
  h(2, 2) = m.lambda;
  h(1, 1) = m.omegas[0];
  h(3, 3) = m.omegas[0];
  for (double t : {0.2, 1.4, -0.9}) {
    Matrix expected = (t * standard_j(2) * h).exp();
    EXPECT_LE(max_abs(stm(m, t) - expected), 1e-12);
  }
}

TEST(ProjectionArea, UnmixedIsBallCapacity) {
  auto m = two_dof();
  Matrix id = Matrix::Identity(4, 4);
  double r = 0.3;
  EXPECT_NEAR(projection_area(m, r, id, 0.0), pi * r * r, 1e-15);
  for (double tau : {0.5, 1.0, 2.0, 4.0}) {
    EXPECT_LT(rel_diff(projection_area(m, r, id, tau), pi * r * r), 1e-10);
  }
}

TEST(ProjectionArea, OneDofClosedForm) {
  QuadraticSaddleModel m{0.9, {}, 0.0};
  Matrix id = Matrix::Identity(2, 2);
  for (double tau : {0.0, 1.0, 3.0}) {
    EXPECT_LT(rel_diff(projection_area(m, 1.0, id, tau), pi), 1e-12);
  }
}

TEST(ProjectionArea, AgreesWithShapeMatrixOracle) {
  auto m = three_dof();
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    Matrix s = random_symplectic(3, 0.5, seed);
    for (double tau : {0.0, 0.8, 2.5}) {
      Matrix g = stm(m, -tau) * s;
      double r = 0.2;
      double oracle = shadow_area_oracle(evolved_shape(g, r).matrix(), 3);
      EXPECT_LT(rel_diff(projection_area(m, r, s, tau), oracle), 1e-8) << "seed " << seed << " tau " << tau;
    }
  }
}

TEST(ProjectionArea, MixedNeverBelowBallCapacity) {
  auto m = two_dof();
  auto grid = default_tau_grid(m);
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    Matrix s = random_symplectic(2, 0.5, seed);
    for (double r : {0.05, 0.4}) {
      auto c = min_projection_area(m, r, s, grid);
      EXPECT_GE(c.min_area, pi * r * r - 1e-9) << "seed " << seed;
    }
  }
}

TEST(ProjectionArea, Preconditions) {
  auto m = two_dof();
  Matrix id = Matrix::Identity(4, 4);
  EXPECT_THROW(projection_area(m, 0.0, id, 0.0), PreconditionError);
  EXPECT_THROW(projection_area(m, 1.0, 2.0 * id, 0.0), PreconditionError);
  EXPECT_THROW(projection_area(m, 1.0, Matrix::Identity(6, 6), 0.0), DimensionError);
  EXPECT_THROW(projection_area(m, 1.0, id, 0.0, ProjectionPlane{2}), DimensionError);
  EXPECT_NO_THROW(projection_area(m, 1.0, id, 0.0, ProjectionPlane{1}));
}

TEST(DefaultTauGrid, SpansThreeEfoldings) {
  auto m = two_dof();
  auto g = default_tau_grid(m);
  ASSERT_EQ(g.size(), 600u);
  EXPECT_EQ(g.front(), 0.0);
  EXPECT_NEAR(g.back(), 3.0 / 0.7350, 1e-14);
  EXPECT_TRUE(std::is_sorted(g.begin(), g.end()));
}

TEST(MinProjectionArea, CurveInvariants) {
  auto m = two_dof();
  auto grid = default_tau_grid(m, 50);
  Matrix s = random_symplectic(2, 0.5, 3);
  auto c = min_projection_area(m, 0.2, s, grid);
  ASSERT_EQ(c.areas.size(), c.taus.size());
  EXPECT_EQ(c.min_area, *std::min_element(c.areas.begin(), c.areas.end()));
  for (double a : c.areas) EXPECT_GT(a, 0.0);
  EXPECT_EQ(c.gromov_scale, pi * 0.04);
  EXPECT_THROW(min_projection_area(m, 0.2, s, {}), PreconditionError);
  EXPECT_THROW(min_projection_area(m, 0.2, s, {1.0, 0.5}), PreconditionError);
}

TEST(MinProjectionArea, ScaleFreeAcrossRadii) {
  auto m = three_dof();
  auto grid = default_tau_grid(m, 200);
  Matrix s = random_symplectic(3, 0.5, 17);
  double ratio0 = 0.0;
  for (double r : {0.1, 0.2, 0.4}) {
    auto c = min_projection_area(m, r, s, grid);
    double ratio = c.min_area / (pi * r * r);
    if (ratio0 == 0.0) ratio0 = ratio;
    EXPECT_LT(rel_diff(ratio, ratio0), 1e-12);
  }
}

TEST(MinProjectionArea, WorkerCountDoesNotChangeResults) {
  auto m = two_dof();
  auto grid = default_tau_grid(m);
  Matrix s = random_symplectic(2, 0.5, 8);
  auto a = min_projection_area(m, 0.1, s, grid, {}, 1);
  auto b = min_projection_area(m, 0.1, s, grid, {}, 5);
  EXPECT_EQ(a.areas, b.areas);
}

TEST(EvolvedShape, CapacityIsConserved) {
  auto m = three_dof();
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    Matrix s = random_symplectic(3, 0.5, seed);
    for (double r : {0.05, 0.4}) {
      for (double tau : {0.0, 1.5, 4.0}) {
        double c = ellipsoid_capacity(evolved_shape(stm(m, -tau) * s, r));
        EXPECT_LT(rel_diff(c, pi * r * r), 1e-8) << "seed " << seed << " tau " << tau;
      }
    }
  }
}

TEST(RadiusScan, RowsAndReferenceLevel) {
  auto m = two_dof();
  auto grid = default_tau_grid(m, 100);
  auto one = radius_scan(m, {0.2}, Matrix::Identity(4, 4), grid, 0.0);
  ASSERT_EQ(one.rows.size(), 1u);
  EXPECT_NEAR(one.rows[0].c_cand_ref, 2 * pi * 0.9875 / 1.8225, 1e-14);
  EXPECT_LT(rel_diff(one.rows[0].min_area, one.rows[0].pi_r2), 1e-6);

  auto many = radius_scan(m, {0.05, 0.1, 0.2, 0.4}, Matrix::Identity(4, 4), grid, 0.0);
  for (auto const& row : many.rows) EXPECT_LT(rel_diff(row.min_area, row.pi_r2), 1e-6);
  EXPECT_THROW(radius_scan(m, {}, Matrix::Identity(4, 4), grid, 0.0), PreconditionError);
}

TEST(RadiusScan, SeededMixerIsReproducible) {
  auto m = two_dof();
  auto grid = default_tau_grid(m, 120);
  auto a = radius_scan(m, {0.1, 0.3}, 42, 0.5, grid, 0.0);
  auto b = radius_scan(m, {0.1, 0.3}, 42, 0.5, grid, 0.0, 3);
  ASSERT_EQ(a.rows.size(), b.rows.size());
  for (std::size_t i = 0; i < a.rows.size(); ++i) {
    EXPECT_EQ(a.rows[i].min_area, b.rows[i].min_area);
    EXPECT_GE(a.rows[i].min_area, a.rows[i].pi_r2 - 1e-9);
  }
}
