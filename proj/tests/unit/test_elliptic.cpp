#include <cmath>
#include <numbers>

#include <gtest/gtest.h>

#include "ellab/elliptic.hpp"
#include "ellab/error.hpp"
#include "ellab/profile1d.hpp"

using namespace ellab;

namespace {

// Independent 1D oracle: Newton on the tridiagonal system
// (v[j-1] - 2 v[j] + v[j+1]) / h^2 + f(v[j]) = 0, v[0] = 0, mirrored ghost at the top.
std::vector<double> discrete_profile(const Nonlinearity& nl, int n, double h, std::vector<double> v) {
  for (int it = 0; it < 100; ++it) {
    std::vector<double> a(n + 1, 0.0), b(n + 1, 1.0), c(n + 1, 0.0), r(n + 1, 0.0);
    double res = 0.0;
    for (int j = 1; j <= n; ++j) {
      const double up = j < n ? v[j + 1] : v[j - 1];
      r[j] = -((v[j - 1] - 2.0 * v[j] + up) / (h * h) + nl(v[j]));
      res = std::max(res, std::abs(r[j]));
      a[j] = 1.0 / (h * h);
      b[j] = -2.0 / (h * h) + nl.derivative(v[j]);
      c[j] = j < n ? 1.0 / (h * h) : 0.0;
      if (j == n) a[j] = 2.0 / (h * h);
    }
    a[1] = 0.0;
    if (res < 1e-13) break;
    // Thomas on rows 1..n
    for (int j = 2; j <= n; ++j) {
      const double m = a[j] / b[j - 1];
      b[j] -= m * c[j - 1];
      r[j] -= m * r[j - 1];
    }
    std::vector<double> d(n + 1, 0.0);
    d[n] = r[n] / b[n];
    for (int j = n - 1; j >= 1; --j) d[j] = (r[j] - c[j] * d[j + 1]) / b[j];
    for (int j = 1; j <= n; ++j) v[j] += d[j];
  }
  return v;
}

std::vector<double> bump(const Grid2D& g, double c, double w, double a) {
  std::vector<double> u0(g.n2 + 1);
  for (int j = 0; j <= g.n2; ++j) {
    const double s = (j * g.h - c) / w;
    u0[j] = std::abs(s) < 1.0 ? a * std::exp(1.0 - 1.0 / (1.0 - s * s)) : 0.0;
  }
  return u0;
}

}  // namespace

// A trace that already solves the 1D discrete problem gives a solution
// independent of x1.
TEST(Elliptic, QuarterWithDiscreteProfileTraceIsOneDimensional) {
  const auto nl = Nonlinearity::logistic();
  const Grid2D g = Grid2D::make(8.0, 12.0, 0.25);
  std::vector<double> start(g.n2 + 1);
  for (int j = 0; j <= g.n2; ++j) start[j] = std::tanh(j * g.h);
  const std::vector<double> v = discrete_profile(nl, g.n2, g.h, start);
  SolveOptions opt;
  opt.tol = 1e-11;
  const Field u = solve_quarter(nl, BoundarySpec::quarter(v), g, opt);
  double err = 0.0;
  for (int i = 0; i < u.nx(); ++i)
    for (int j = 0; j < u.ny(); ++j) err = std::max(err, std::abs(u(i, j) - v[j]));
  EXPECT_LT(err, 1e-9);
}

TEST(Elliptic, MethodsAgree) {
  const auto nl = Nonlinearity::linear_decay();
  const Grid2D g = Grid2D::make(10.0, 8.0, 0.25);
  const BoundarySpec bc = BoundarySpec::quarter(bump(g, 4.0, 2.0, 0.5));
  SolveOptions mono, newton, aut;
  mono.method = SolveMethod::monotone;
  newton.method = SolveMethod::newton;
  mono.tol = newton.tol = aut.tol = 1e-11;
  const Field a = solve_quarter(nl, bc, g, mono);
  const Field b = solve_quarter(nl, bc, g, newton);
  const Field c = solve_quarter(nl, bc, g, aut);
  for (std::size_t k = 0; k < a.values().size(); ++k) {
    EXPECT_NEAR(a.values()[k], b.values()[k], 1e-9);
    EXPECT_NEAR(a.values()[k], c.values()[k], 1e-9);
  }
  EXPECT_EQ(a.certificate()->method, "monotone");
  EXPECT_EQ(b.certificate()->method, "newton");
  EXPECT_LE(c.certificate()->residual, 1e-11);
}

TEST(Elliptic, MonotoneIteratesIncreaseBetweenSubAndSup) {
  const auto nl = Nonlinearity::logistic();
  const Grid2D g = Grid2D::make(6.0, 6.0, 0.25);
  const BoundarySpec bc = BoundarySpec::quarter(bump(g, 3.0, 2.0, 0.8));
  const Field sub = automatic_subsolution(nl, bc, g);
  const Field sup = automatic_supersolution(nl, bc, g);
  std::vector<double> prev = sub.values();
  bool ordered = true;
  SolveOptions opt;
  opt.method = SolveMethod::monotone;
  opt.tol = 1e-10;
  opt.on_iterate = [&](int, const Field& u) {
    for (std::size_t k = 0; k < prev.size(); ++k)
      ordered = ordered && u.values()[k] >= prev[k] - 1e-12 && u.values()[k] <= sup.values()[k] + 1e-12;
    prev = u.values();
  };
  const Field u = monotone_iterate(sub, sup, nl, opt);
  EXPECT_TRUE(ordered);
  EXPECT_LE(u.certificate()->residual, 1e-10);
}

TEST(Elliptic, HalfProblemWithZeroTraceValueIsConstant) {
  const auto nl = Nonlinearity::linear_decay();
  const Grid2D g = Grid2D::make(10.0, 5.0, 0.25);
  const Field u = solve_half(nl, BoundarySpec::half(std::vector<double>(g.n2, 1.0)), g);
  for (double v : u.values()) EXPECT_NEAR(v, 1.0, 1e-12);
}

TEST(Elliptic, ThreadCountDoesNotChangeBits) {
  const auto nl = Nonlinearity::logistic();
  const Grid2D g = Grid2D::make(12.0, 8.0, 0.25);
  const BoundarySpec bc = BoundarySpec::quarter(bump(g, 4.0, 2.0, 0.5));
  SolveOptions one, four;
  four.threads = 4;
  EXPECT_EQ(solve_quarter(nl, bc, g, one).values(), solve_quarter(nl, bc, g, four).values());
}

TEST(Elliptic, ResidualOfExactDiscreteSolutionVanishes) {
  const auto nl = Nonlinearity::constant(0.0);
  const Grid2D g = Grid2D::make(4.0, 4.0, 0.5);
  // Discrete harmonic: u = x1 x2 satisfies the 5-point stencil exactly.
  BoundarySpec bc;
  bc.left.assign(g.n2 + 1, 0.0);
  bc.right = FarKind::dirichlet;
  for (int j = 0; j <= g.n2; ++j) bc.right_trace.push_back(4.0 * j * g.h);
  bc.top = FarKind::dirichlet;
  for (int i = 0; i <= g.n1; ++i) bc.top_trace.push_back(4.0 * i * g.h);
  Field u(g, bc);
  for (int i = 0; i < u.nx(); ++i)
    for (int j = 0; j < u.ny(); ++j) u(i, j) = u.x1(i) * u.x2(j);
  EXPECT_LT(residual_norm(u, nl), 1e-12);
}

TEST(Elliptic, WrongBoundaryKindRejected) {
  const auto nl = Nonlinearity::logistic();
  const Grid2D g = Grid2D::make(4.0, 4.0, 0.5);
  EXPECT_THROW(solve_quarter(nl, BoundarySpec::half(std::vector<double>(g.n2, 0.5)), g), InputError);
  EXPECT_THROW(solve_half(nl, BoundarySpec::quarter(std::vector<double>(g.n2 + 1, 0.5)), g), InputError);
  EXPECT_THROW(Grid2D::make(4.1, 4.0, 0.5), InputError);
}

TEST(Elliptic, NonConvergenceReported) {
  const auto nl = Nonlinearity::logistic();
  const Grid2D g = Grid2D::make(8.0, 8.0, 0.25);
  SolveOptions opt;
  opt.method = SolveMethod::monotone;
  opt.max_monotone_iterations = 2;
  opt.tol = 1e-12;
  EXPECT_THROW(solve_quarter(nl, BoundarySpec::quarter(bump(g, 4.0, 2.0, 0.5)), g, opt), NumericError);
}
