#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "ellab/error.hpp"
#include "ellab/trajectory.hpp"

using namespace ellab;

namespace {

Field random_field(std::mt19937_64& rng) {
  std::uniform_int_distribution<int> cells(4, 40);
  const Grid2D g = Grid2D::make(cells(rng) * 0.5, cells(rng) * 0.5, 0.5);
  std::uniform_real_distribution<double> val(0.0, 3.0);
  std::vector<double> u0(g.n2 + 1);
  for (auto& x : u0) x = val(rng);
  Field u(g, BoundarySpec::quarter(u0));
  for (int i = 1; i < u.nx(); ++i)
    for (int j = 1; j < u.ny(); ++j) u(i, j) = val(rng);
  return u;
}

}  // namespace

TEST(Semiflow, IdentityAndCompositionAreBitExact) {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 100; ++trial) {
    const Field u = random_field(rng);
    EXPECT_EQ(shift(u, 0.0).values(), u.values());
    const int n1 = u.grid().n1;
    std::uniform_int_distribution<int> pick(0, n1 - 1);
    const int a = pick(rng);
    const int b = std::uniform_int_distribution<int>(0, n1 - 1 - a)(rng);
    const Field ab = shift(shift(u, a * 0.5), b * 0.5);
    const Field direct = shift(u, (a + b) * 0.5);
    EXPECT_EQ(ab.values(), direct.values());
    EXPECT_EQ(ab.boundary().left, direct.boundary().left);
    EXPECT_EQ(ab.nx(), direct.nx());
  }
}

TEST(Semiflow, ShiftReadsTheRightColumns) {
  std::mt19937_64 rng(3);
  const Field u = random_field(rng);
  const Field s = shift(u, 1.0);
  for (int i = 0; i < s.nx(); ++i)
    for (int j = 0; j < s.ny(); ++j) EXPECT_EQ(s(i, j), u(i + 2, j));
}

TEST(Semiflow, InvalidShifts) {
  std::mt19937_64 rng(5);
  const Field u = random_field(rng);
  EXPECT_THROW(shift(u, 0.3), InputError);
  EXPECT_THROW(shift(u, u.grid().L1), InputError);
  EXPECT_THROW(shift(u, -0.5), InputError);
}

TEST(ShiftGrid, LogSpacedOnGridMultiples) {
  const Grid2D g = Grid2D::make(60.0, 30.0, 0.25);
  const auto h = shift_grid(g, 16, 0.8);
  ASSERT_GE(h.size(), 8u);
  for (std::size_t k = 0; k < h.size(); ++k) {
    EXPECT_NEAR(std::fmod(h[k], 0.25), 0.0, 1e-12);
    if (k) EXPECT_GT(h[k], h[k - 1]);
  }
  EXPECT_LE(h.back(), 48.0);
}

// u = V_1(x2) + e^{-x1} g(x2) tends to V_1; the zero profile stays far.
TEST(OmegaLimit, SyntheticConvergence) {
  const auto nl = Nonlinearity::logistic();
  const Grid2D g = Grid2D::make(40.0, 20.0, 0.25);
  const AttractorEstimate table = attractor_table(nl, 2.0, ProblemKind::quarter);
  ASSERT_EQ(table.elements.size(), 2u);  // V_0 = 0 and V_1
  const Candidate& target = table.elements[1];
  Field u(g, BoundarySpec::quarter(std::vector<double>(g.n2 + 1, 0.0)));
  for (int i = 0; i < u.nx(); ++i)
    for (int j = 0; j < u.ny(); ++j) u(i, j) = target(u.x2(j)) + 0.5 * std::exp(-u.x1(i)) * std::sin(u.x2(j));
  const TrajectoryReport r = omega_limit(u, table.elements);
  ASSERT_TRUE(r.detected_z.has_value());
  EXPECT_DOUBLE_EQ(*r.detected_z, 1.0);
  EXPECT_LT(r.final_distance, 1e-6);
  EXPECT_LT(r.tail_slope, -0.5);
  EXPECT_NEAR(r.M_estimate, 1.0, 1e-6);
}

TEST(OmegaLimit, AmbiguousWhenCandidatesTie) {
  const Grid2D g = Grid2D::make(10.0, 5.0, 0.25);
  const Field u(g, BoundarySpec::half(std::vector<double>(g.n2, 0.5)), 0.5);
  const TrajectoryReport r = omega_limit(u, {Candidate{0.0, {}}, Candidate{1.0, {}}});
  EXPECT_FALSE(r.converged);
  EXPECT_EQ(r.ambiguous.size(), 2u);
}

TEST(OmegaLimit, ThreadInvariant) {
  const auto nl = Nonlinearity::abs_sin();
  const AttractorEstimate table = attractor_table(nl, 7.0, ProblemKind::half);
  const Grid2D g = Grid2D::make(20.0, 5.0, 0.25);
  Field u(g, BoundarySpec::half(std::vector<double>(g.n2, 5.0)));
  for (int i = 1; i < u.nx(); ++i)
    for (int j = 0; j < u.ny(); ++j) u(i, j) = 6.0 + std::exp(-u.x1(i)) * std::cos(u.x2(j));
  OmegaOptions one, many;
  many.threads = 3;
  const auto a = omega_limit(u, table.elements, one);
  const auto b = omega_limit(u, table.elements, many);
  EXPECT_EQ(a.distances, b.distances);
  EXPECT_EQ(a.tail_slope, b.tail_slope);
}

TEST(Windows, NormsAndExtrema) {
  const Grid2D g = Grid2D::make(4.0, 4.0, 0.5);
  Field u(g, BoundarySpec::quarter(std::vector<double>(g.n2 + 1, 0.0)));
  for (int i = 0; i < u.nx(); ++i)
    for (int j = 0; j < u.ny(); ++j) u(i, j) = u.x1(i) + 2.0 * u.x2(j);
  const auto e = window_extrema(u, {1.0, 2.0, 1.0, 3.0});
  EXPECT_DOUBLE_EQ(e.min, 3.0);
  EXPECT_DOUBLE_EQ(e.max, 8.0);
  // Linear field: sup 12, first difference 2, second difference 0.
  EXPECT_NEAR(window_norm(u, whole_domain(u), 2), 12.0 + 2.0, 1e-12);
  EXPECT_DOUBLE_EQ(window_norm(u, whole_domain(u), 0), 12.0);
  EXPECT_THROW(window_norm(u, whole_domain(u), 1), InputError);
}

TEST(EstimateM, WindowsOfConstantTail) {
  const Grid2D g = Grid2D::make(16.0, 4.0, 0.25);
  Field u(g, BoundarySpec::half(std::vector<double>(g.n2, 3.0)));
  for (int i = 1; i < u.nx(); ++i)
    for (int j = 0; j < u.ny(); ++j) u(i, j) = 2.0 + std::exp(-u.x1(i));
  const MEstimate m = estimate_M(u);
  EXPECT_NEAR(m.M, 2.0, 1e-5);
  EXPECT_NEAR(m.m, 2.0, 1e-6);
  EXPECT_LT(m.cauchy, 1e-3);
}
