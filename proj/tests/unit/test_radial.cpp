#include <cmath>
#include <numbers>

#include <gtest/gtest.h>

#include "ellab/elliptic.hpp"
#include "ellab/error.hpp"
#include "ellab/radial.hpp"

using namespace ellab;

namespace {

// First positive root of J0 by bisection on std::cyl_bessel_j.
double j0_first_root() {
  double a = 2.0, b = 3.0;
  for (int k = 0; k < 200; ++k) {
    const double m = 0.5 * (a + b);
    (std::cyl_bessel_j(0.0, m) > 0.0 ? a : b) = m;
  }
  return 0.5 * (a + b);
}

}  // namespace

TEST(Eigenpair, DiskMatchesBesselRoot) {
  const double j0 = j0_first_root();
  EXPECT_NEAR(j0, 2.404825557695773, 1e-12);
  const Eigenpair e = dirichlet_eigenpair(2, 1.0, 1024);
  EXPECT_NEAR(e.lambda, j0 * j0, 1e-3);
  EXPECT_NEAR(e.phi.front(), 1.0, 1e-15);
  EXPECT_NEAR(e.phi.back(), 0.0, 1e-15);
  EXPECT_NEAR(e.rayleigh, e.lambda, 1e-8);
}

// Richardson extrapolation of two resolutions lands on the exact value.
TEST(Eigenpair, SecondOrderConvergence) {
  const double exact = std::pow(j0_first_root(), 2);
  const double l1 = dirichlet_eigenpair(2, 1.0, 128).lambda;
  const double l2 = dirichlet_eigenpair(2, 1.0, 256).lambda;
  const double rich = (4.0 * l2 - l1) / 3.0;
  EXPECT_LT(std::abs(rich - exact), 0.1 * std::abs(l2 - exact));
}

TEST(Eigenpair, BallInThreeDimensions) {
  // j_{1/2} has first root pi.
  EXPECT_NEAR(dirichlet_eigenpair(3, 1.0, 1024).lambda, std::numbers::pi * std::numbers::pi, 1e-3);
}

TEST(Eigenpair, InverseSquareScaling) {
  const double l1 = dirichlet_eigenpair(2, 1.0, 512).lambda;
  const double l2 = dirichlet_eigenpair(2, 2.0, 512).lambda;
  EXPECT_NEAR(l2 * 4.0 / l1, 1.0, 1e-8);
  EXPECT_THROW(dirichlet_eigenpair(0, 1.0), InputError);
}

TEST(Bubble, LogisticSubsolution) {
  const auto g = Nonlinearity::logistic();
  const RadialBubble b = radial_bubble(g, 1.0, 0.1, 2);
  ASSERT_TRUE(b.feasible) << b.message;
  EXPECT_GE(b.v0, 0.9 - 1e-12);
  EXPECT_LT(b.v0, 1.0);
  EXPECT_NEAR(b.v.back(), 0.0, 1e-9);
  for (double v : b.v) EXPECT_LT(v, 1.0);
  for (std::size_t k = 1; k < b.v.size(); ++k) EXPECT_LE(b.v[k], b.v[k - 1] + 1e-12);
  const RadialBubble tight = radial_bubble(g, 1.0, 0.05, 2);
  ASSERT_TRUE(tight.feasible);
  EXPECT_GE(tight.R_prime, b.R_prime);
}

TEST(Bubble, EnergyComparison) {
  const auto g = Nonlinearity::logistic();
  const RadialBubble b = radial_bubble(g, 1.0, 0.1, 2);
  const BubbleEnergy e = bubble_energy(b, g, 1.0);
  EXPECT_LE(e.I_v, e.I_w);
  EXPECT_NEAR(e.bound_exponent, 2.0, 1e-9);
  EXPECT_GE(e.bound_exponent - e.ramp_exponent, 0.8);
}

TEST(Bubble, UnitBallVolumes) {
  EXPECT_NEAR(unit_ball_volume(1), 2.0, 1e-15);
  EXPECT_NEAR(unit_ball_volume(2), std::numbers::pi, 1e-15);
  EXPECT_NEAR(unit_ball_volume(3), 4.0 * std::numbers::pi / 3.0, 1e-14);
}

TEST(Sliding, ConstantFieldAboveBubble) {
  const Grid2D g = Grid2D::make(20.0, 20.0, 0.25);
  const Field v(g, BoundarySpec::quarter(std::vector<double>(g.n2 + 1, 1.0)), 1.0);
  const RadialBubble b = radial_bubble(Nonlinearity::logistic(), 1.0, 0.1, 2);
  const SlidingReport r = sliding_verify(v, b, {7.0, 10.0}, {13.0, 10.0});
  EXPECT_FALSE(r.failed);
  EXPECT_NEAR(r.min_margin, 1.0 - b.v0, 1e-9);
  EXPECT_EQ(r.steps, 6 * 64);
}

TEST(Sliding, DetectsCrossing) {
  const Grid2D g = Grid2D::make(20.0, 20.0, 0.25);
  Field u(g, BoundarySpec::quarter(std::vector<double>(g.n2 + 1, 0.0)));
  for (int i = 0; i < u.nx(); ++i)
    for (int j = 1; j < u.ny(); ++j) u(i, j) = u.x1(i) < 12.0 ? 1.0 : 0.5;
  const RadialBubble b = radial_bubble(Nonlinearity::logistic(), 1.0, 0.1, 2);
  const SlidingReport r = sliding_verify(u, b, {6.0, 10.0}, {14.0, 10.0});
  EXPECT_TRUE(r.failed);
  EXPECT_LT(r.min_margin, 0.0);
}
