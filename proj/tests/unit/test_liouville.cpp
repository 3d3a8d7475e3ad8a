#include <cmath>

#include <gtest/gtest.h>

#include "ellab/error.hpp"
#include "ellab/liouville.hpp"

using namespace ellab;

TEST(Sweep, RandomStartsAreNonnegativeAndSeeded) {
  const Grid2D g = Grid2D::make(8.0, 8.0, 0.25);
  const Field a = random_initial_field(g, BoundarySpec::periodic_box(), 42, 3);
  const Field b = random_initial_field(g, BoundarySpec::periodic_box(), 42, 3);
  const Field c = random_initial_field(g, BoundarySpec::periodic_box(), 42, 4);
  EXPECT_EQ(a.values(), b.values());
  EXPECT_NE(a.values(), c.values());
  for (double v : a.values()) EXPECT_GE(v, 0.0);
  const Field s = random_initial_field(g, BoundarySpec::strip(), 42, 0);
  for (int i = 0; i < s.nx(); ++i) EXPECT_EQ(s(i, 0), 0.0);
}

TEST(Sweep, PreconditionChecks) {
  EXPECT_THROW(check_sweep_precondition(Nonlinearity::constant(1.0)), InputError);
  EXPECT_NO_THROW(check_sweep_precondition(Nonlinearity::abs_sin()));
  EXPECT_NO_THROW(check_sweep_precondition(Nonlinearity::linear_decay()));
}

TEST(Sweep, SmallBoxTrialsAreConstantZeros) {
  const auto nl = Nonlinearity::abs_sin();
  SweepOptions opt;
  const SweepReport r = periodic_box_sweep(nl, 3, Grid2D::make(6.0, 6.0, 0.25), 9, opt);
  EXPECT_EQ(r.trials, 3);
  EXPECT_EQ(r.converged, 3);
  EXPECT_EQ(r.constant_count, 3);
  EXPECT_LT(r.zero_distance, 1e-3);
  EXPECT_FALSE(r.banner.empty());
}

TEST(Sweep, ThreadInvariantRecords) {
  const auto nl = Nonlinearity::abs_sin();
  SweepOptions one, two;
  two.threads = 2;
  const Grid2D g = Grid2D::make(6.0, 6.0, 0.25);
  const SweepReport a = periodic_box_sweep(nl, 2, g, 5, one);
  const SweepReport b = periodic_box_sweep(nl, 2, g, 5, two);
  for (int t = 0; t < 2; ++t) {
    EXPECT_EQ(a.records[t].mean, b.records[t].mean);
    EXPECT_EQ(a.records[t].residual, b.records[t].residual);
    EXPECT_EQ(a.records[t].iterations, b.records[t].iterations);
  }
}

TEST(Sweep, StripClassification) {
  const auto nl = Nonlinearity::abs_sin();
  const auto profiles = strip_profiles(nl);
  const Grid2D g = Grid2D::make(4.0, 20.0, 0.25);
  Field u(g, BoundarySpec::strip());
  const Profile1D* pi_profile = nullptr;
  for (const auto& p : profiles)
    if (std::abs(p.z - M_PI) < 1e-9) pi_profile = &p;
  ASSERT_NE(pi_profile, nullptr);
  for (int i = 0; i < u.nx(); ++i)
    for (int j = 0; j < u.ny(); ++j) u(i, j) = pi_profile->value_at(u.x2(j));
  TrialRecord rec;
  classify_strip(u, profiles, 1e-4, rec);
  EXPECT_TRUE(rec.one_dimensional);
  EXPECT_NEAR(rec.matched_z, M_PI, 1e-12);
  EXPECT_LT(rec.profile_distance, 1e-12);
}

// Logistic floor xi' = xi (1 - xi), xi(0) = 1/2 has xi = 1 / (1 + e^{-t}).
TEST(Floor, LogisticClosedForm) {
  const FloorCurve c = parabolic_floor(Nonlinearity::logistic(), 0.5, 5.0, 51);
  ASSERT_EQ(c.t.size(), 51u);
  EXPECT_FALSE(c.blow_up);
  for (std::size_t k = 0; k < c.t.size(); ++k) EXPECT_NEAR(c.xi[k], 1.0 / (1.0 + std::exp(-c.t[k])), 1e-9);
}

TEST(Floor, StationaryAtAZero) {
  const FloorCurve c = parabolic_floor(Nonlinearity::abs_sin(), M_PI, 3.0);
  for (double x : c.xi) EXPECT_EQ(x, M_PI);
}

TEST(Floor, InvalidArguments) {
  EXPECT_THROW(parabolic_floor(Nonlinearity::logistic(), -1.0, 1.0), InputError);
  EXPECT_THROW(parabolic_floor(Nonlinearity::logistic(), 0.5, 0.0), InputError);
}
