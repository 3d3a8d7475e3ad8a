// Acceptance run: one PASS/FAIL line per criterion, nonzero exit on any FAIL.
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <numbers>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <fmt/format.h>

#include "ellab/cli/app.hpp"
#include "ellab/cli/config.hpp"
#include "ellab/cli/outputs.hpp"
#include "ellab/elliptic.hpp"
#include "ellab/liouville.hpp"
#include "ellab/profile1d.hpp"
#include "ellab/radial.hpp"
#include "ellab/trajectory.hpp"

using namespace ellab;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  bool pass;
  std::string detail;
};

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

double first_integral_error(const Profile1D& p, const Nonlinearity& nl) {
  double e = 0.0;
  for (std::size_t k = 0; k < p.values.size(); ++k)
    e = std::max(e, std::abs(p.slopes[k] * p.slopes[k] - 2.0 * (nl.F(p.z) - nl.F(p.values[k]))));
  return e;
}

std::vector<double> bump_trace(const Grid2D& g, double c, double w, double a) {
  std::vector<double> u0(g.n2 + 1);
  for (int j = 0; j <= g.n2; ++j) {
    const double s = (j * g.h - c) / w;
    u0[j] = std::abs(s) < 1.0 ? a * std::exp(1.0 - 1.0 / (1.0 - s * s)) : 0.0;
  }
  return u0;
}

// Shared between criteria 4 and 9.
struct QuarterRun {
  Field u;
  double seconds;
};

QuarterRun& quarter_run() {
  static QuarterRun run = [] {
    const auto t0 = std::chrono::steady_clock::now();
    const Grid2D g = Grid2D::make(60.0, 30.0, 0.25);
    SolveOptions opt;
    opt.tol = 1e-10;
    Field u = solve_quarter(Nonlinearity::linear_decay(), BoundarySpec::quarter(bump_trace(g, 10.0, 5.0, 0.5)), g, opt);
    return QuarterRun{std::move(u), seconds_since(t0)};
  }();
  return run;
}

Outcome criterion1() {
  const auto t0 = std::chrono::steady_clock::now();
  const Profile1D p = compute_profile(Nonlinearity::abs_sin(), std::numbers::pi, 10.0, 2048);
  const double t = seconds_since(t0);
  double err = 0.0;
  for (std::size_t k = 0; k < p.xi.size(); ++k)
    err = std::max(err, std::abs(p.values[k] - (4.0 * std::atan(std::exp(p.xi[k])) - std::numbers::pi)));
  const double slope = std::abs(p.slope0 - 2.0);
  return {err < 1e-6 && slope < 1e-8 && t < 1.0,
          fmt::format("max error {:.2e}, |V'(0) - 2| = {:.2e}, {:.3f} s", err, slope, t)};
}

Outcome criterion2() {
  const auto lg = Nonlinearity::logistic();
  const auto as = Nonlinearity::abs_sin();
  const auto ct = Nonlinearity::cantor(3);
  double worst = 0.0;
  int count = 0;
  const auto add = [&](const Nonlinearity& nl, double z) {
    worst = std::max(worst, first_integral_error(compute_profile(nl, z, 30.0, 1200), nl));
    ++count;
  };
  add(lg, 1.0);
  add(as, std::numbers::pi);
  add(as, 2.0 * std::numbers::pi);
  for (double z : compute_Zf(ct).points) add(ct, z);
  return {worst < 1e-8, fmt::format("max |W^2 - 2(F(z) - F(V))| = {:.2e} over {} profiles", worst, count)};
}

Outcome criterion3() {
  const auto nl = Nonlinearity::cantor(3);
  const auto t0 = std::chrono::steady_clock::now();
  const ZeroSet Z = compute_Zf(nl);
  const double t = seconds_since(t0);
  // Brute-force oracle on 10^6 points.
  const int n = 1000000;
  const double h = 1.0 / n;
  std::vector<double> scan;
  double F = 0.0, best = -1.0, prev = nl(0.0);
  bool in_zero = false;
  for (int k = 0; k <= n; ++k) {
    const double fs = nl(k * h);
    if (k > 0) F += 0.5 * h * (prev + fs);
    prev = fs;
    const bool zero = fs <= 1e-12;
    if (zero && !in_zero && F > best) scan.push_back(k * h);
    in_zero = zero;
    if (!zero) best = std::max(best, F);
  }
  // Exact left endpoints of the level-3 intervals.
  const std::vector<double> exact{0.0, 2.0 / 27, 6.0 / 27, 8.0 / 27, 18.0 / 27, 20.0 / 27, 24.0 / 27, 26.0 / 27};
  bool ok = Z.points.size() == exact.size() && scan.size() == exact.size();
  double err = 0.0;
  if (ok)
    for (std::size_t k = 0; k < exact.size(); ++k)
      err = std::max({err, std::abs(Z.points[k] - scan[k]), std::abs(Z.points[k] - exact[k])});
  return {ok && err < 1e-5 && t < 5.0,
          fmt::format("{} limits (scan {}), max endpoint error {:.2e}, {:.3f} s", Z.points.size(), scan.size(), err, t)};
}

Outcome criterion4() {
  const auto nl = Nonlinearity::linear_decay();
  const auto t0 = std::chrono::steady_clock::now();
  const Field& u = quarter_run().u;
  const AttractorEstimate table = attractor_table(nl, 2.0, ProblemKind::quarter);
  const TrajectoryReport r = omega_limit(u, table.elements);
  const double t = quarter_run().seconds + seconds_since(t0);
  const double mu = check_hypotheses(nl).mu;
  const Profile1D V = compute_profile(nl, 1.0, 30.0, 1200);
  double sup = 0.0;
  const int i50 = static_cast<int>(std::lround(50.0 / u.grid().h));
  for (int j = 0; u.x2(j) <= 20.0 + 1e-12; ++j) sup = std::max(sup, std::abs(u(i50, j) - V.value_at(u.x2(j))));
  const double inf = window_extrema(u, {25.0, 60.0, 25.0, 30.0}).min;
  const double res = u.certificate()->residual;
  const bool detected = r.detected_z && std::abs(*r.detected_z - mu) < 1e-9;
  return {res < 1e-8 && detected && sup < 5e-2 && inf > mu - 5e-2 && t < 60.0,
          fmt::format("residual {:.2e}, detected z = {}, mu = {}, sup |u(50,.) - V| = {:.2e}, inf on far window {:.6f}, "
                      "{:.2f} s",
                      res, r.detected_z ? fmt::format("{}", *r.detected_z) : "none", mu, sup, inf, t)};
}

Outcome criterion5() {
  const auto nl = Nonlinearity::abs_sin();
  const auto t0 = std::chrono::steady_clock::now();
  const Grid2D g = Grid2D::make(60.0, 20.0, 0.25);
  SolveOptions opt;
  opt.tol = 1e-10;
  const Field u = solve_half(nl, BoundarySpec::half(std::vector<double>(g.n2, 5.0)), g, opt);
  const TrajectoryReport r = omega_limit(u, attractor_table(nl, 7.0, ProblemKind::half).elements);
  const double t = seconds_since(t0);
  const double z = r.detected_z.value_or(-1.0);
  const bool in_set = std::abs(z - std::numbers::pi) < 1e-9 || std::abs(z - 2.0 * std::numbers::pi) < 1e-9;
  return {r.converged && r.margin_ratio >= 2.0 && in_set && std::abs(z - r.M_estimate) < 1e-2 &&
              r.final_distance < 1e-2 && t < 60.0,
          fmt::format("z = {}, M = {:.6f}, margin {:.3g}, final distance {:.2e}, {:.2f} s", z, r.M_estimate,
                      r.margin_ratio, r.final_distance, t)};
}

Outcome criterion6() {
  const auto nl = Nonlinearity::linear_decay();
  const Grid2D g = Grid2D::make(60.0, 20.0, 0.25);
  SolveOptions opt;
  opt.tol = 1e-10;
  const Field u = solve_half(nl, BoundarySpec::half(std::vector<double>(g.n2, 3.0)), g, opt);
  const TrajectoryReport r = omega_limit(u, attractor_table(nl, 4.0, ProblemKind::half).elements);
  const double mu = check_hypotheses(nl).mu;
  if (!r.detected_z) return {false, "no limit detected"};
  const double z = *r.detected_z;
  return {z >= mu && std::abs(nl(z)) < 1e-6, fmt::format("z = {}, mu = {}, |f(z)| = {:.2e}", z, mu, std::abs(nl(z)))};
}

Outcome criterion7() {
  const auto g = Nonlinearity::logistic();
  const RadialBubble b = radial_bubble(g, 1.0, 0.1, 2);
  const RadialBubble b2 = radial_bubble(g, 1.0, 0.05, 2);
  if (!b.feasible || !b2.feasible) return {false, "bubble not found: " + b.message + b2.message};
  double vmax = 0.0;
  for (double v : b.v) vmax = std::max(vmax, v);
  const BubbleEnergy e = bubble_energy(b, g, 1.0, {5.0, 10.0, 20.0});
  const double gap = e.bound_exponent - e.ramp_exponent;
  const bool shape = b.v0 >= 0.9 - 1e-12 && b.v0 < 1.0 && vmax < 1.0 && std::abs(b.v.back()) < 1e-9;
  return {shape && b2.R_prime >= b.R_prime && e.I_v <= e.I_w && std::abs(gap) >= 0.8,
          fmt::format("v(0) = {:.6f}, R' = {:.4f}, R'(0.05) = {:.4f}, I(v) = {:.4f} <= I(w) = {:.4f}, exponents {:.3f} "
                      "vs {:.3f}",
                      b.v0, b.R_prime, b2.R_prime, e.I_v, e.I_w, e.ramp_exponent, e.bound_exponent)};
}

Outcome criterion8() {
  // Oracle: Richardson extrapolation of two coarse resolutions.
  const double l1 = dirichlet_eigenpair(2, 1.0, 256).lambda;
  const double l2 = dirichlet_eigenpair(2, 1.0, 512).lambda;
  const double oracle = (4.0 * l2 - l1) / 3.0;
  const Eigenpair e = dirichlet_eigenpair(2, 1.0, 1024);
  const Eigenpair e2 = dirichlet_eigenpair(2, 2.0, 1024);
  const double scale = std::abs(e2.lambda * 4.0 / e.lambda - 1.0);
  return {std::abs(e.lambda - 5.78319) < 1e-3 && std::abs(e.lambda - oracle) < 1e-3 && scale < 1e-8,
          fmt::format("lambda = {:.8f}, extrapolated {:.8f}, scaling error {:.1e}", e.lambda, oracle, scale)};
}

Outcome criterion9() {
  const Field& u = quarter_run().u;
  const RadialBubble b = radial_bubble(Nonlinearity::linear_decay(), 1.0, 0.1, 2);
  if (!b.feasible) return {false, b.message};
  const SlidingReport s = sliding_verify(u, b, {15.0, 10.0}, {45.0, 10.0});
  bool all_positive = !s.margins.empty();
  for (double m : s.margins) all_positive = all_positive && m > 0.0;
  return {all_positive && !s.failed && s.lower_bound >= b.v0 - 1e-3,
          fmt::format("{} placements, min margin {:.4f}, u >= {:.6f} along the path (v(0) = {:.6f})", s.margins.size(),
                      s.min_margin, s.lower_bound, b.v0)};
}

Outcome criterion10() {
  const auto nl = Nonlinearity::abs_sin();
  const auto t0 = std::chrono::steady_clock::now();
  const SweepReport box = periodic_box_sweep(nl, 20, Grid2D::make(16.0, 16.0, 0.25), 42);
  const SweepReport strip = halfspace_strip_sweep(nl, 20, Grid2D::make(16.0, 20.0, 0.25), 42);
  const double t = seconds_since(t0);
  const bool box_ok = box.converged > 0 && box.constant_count == box.converged && box.zero_distance < 1e-3;
  bool strip_ok = strip.converged > 0;
  for (const auto& r : strip.records)
    if (r.converged) strip_ok = strip_ok && r.lateral_variation < 1e-4 && r.profile_distance < 1e-2;
  return {box_ok && strip_ok && t < 120.0,
          fmt::format("box {}/{} converged, {} constant, value distance {:.1e}; strip {}/{} converged, {} "
                      "one-dimensional, lateral {:.1e}, profile distance {:.1e}; {:.1f} s",
                      box.converged, box.trials, box.constant_count, box.zero_distance, strip.converged, strip.trials,
                      strip.constant_count, strip.max_lateral_variation, strip.max_profile_distance, t)};
}

Outcome criterion11() {
  std::mt19937_64 rng(2024);
  int failures = 0;
  for (int trial = 0; trial < 100; ++trial) {
    std::uniform_int_distribution<int> cells(4, 48);
    const Grid2D g = Grid2D::make(cells(rng) * 0.25, cells(rng) * 0.25, 0.25);
    std::uniform_real_distribution<double> val(0.0, 5.0);
    std::vector<double> u0(g.n2 + 1);
    for (auto& x : u0) x = val(rng);
    Field u(g, BoundarySpec::quarter(u0));
    for (int i = 1; i < u.nx(); ++i)
      for (int j = 1; j < u.ny(); ++j) u(i, j) = val(rng);
    const int a = std::uniform_int_distribution<int>(0, g.n1 - 1)(rng);
    const int b = std::uniform_int_distribution<int>(0, g.n1 - 1 - a)(rng);
    const bool identity = shift(u, 0.0).values() == u.values();
    const Field lhs = shift(shift(u, a * g.h), b * g.h);
    const Field rhs = shift(u, (a + b) * g.h);
    if (!identity || lhs.values() != rhs.values() || lhs.boundary().left != rhs.boundary().left) ++failures;
  }
  return {failures == 0, fmt::format("{} of 100 random fields violate identity or composition", failures)};
}

// Runs one CLI invocation per thread count and compares output files.
Outcome criterion12() {
  const fs::path root = fs::temp_directory_path() / "ellab_acceptance_determinism";
  fs::remove_all(root);
  fs::create_directories(root);

  struct Case {
    std::string name;
    std::string subcommand;
    cli::ExperimentConfig cfg;
    std::vector<std::string> files;
  };
  cli::ExperimentConfig quarter;
  quarter.nonlinearity.name = "linear-decay";
  quarter.domain = {"quarter", 60.0, 30.0, 0.25, "bump:10,5,0.5", "neumann", "neumann"};
  quarter.solver.tol = 1e-10;
  quarter.analysis.M_cap = 2.0;
  cli::ExperimentConfig half;
  half.nonlinearity.name = "abs-sin";
  half.domain = {"half", 60.0, 20.0, 0.25, "constant:5", "neumann", "neumann"};
  half.solver.tol = 1e-10;
  half.analysis.M_cap = 7.0;
  cli::ExperimentConfig sweep = half;
  sweep.analysis.sweep.enabled = true;
  sweep.seed = 42;
  const std::vector<Case> cases{{"quarter", "trajectory", quarter, {"field.csv", "trajectory.json"}},
                                {"half", "trajectory", half, {"field.csv", "trajectory.json"}},
                                {"sweep", "liouville-sweep", sweep, {"sweep.json"}}};
  const int threads[] = {1, 2, 8};
  int mismatches = 0, compared = 0;
  std::string first_bad;
  for (const auto& c : cases) {
    const fs::path cfg_path = root / (c.name + ".json");
    cli::write_file(cfg_path, cli::serialize(c.cfg));
    std::vector<std::string> reference;
    for (int t : threads) {
      const fs::path out = root / fmt::format("{}_t{}", c.name, t);
      std::ostringstream log, err;
      const int code = cli::run_cli({c.subcommand, "--config", cfg_path.string(), "--out", out.string(), "--threads",
                                     std::to_string(t)},
                                    log, err);
      if (code != 0) return {false, fmt::format("{} at {} threads exited {}: {}", c.name, t, code, err.str())};
      for (std::size_t k = 0; k < c.files.size(); ++k) {
        const std::string bytes = cli::read_file(out / c.files[k]);
        if (t == threads[0]) {
          reference.push_back(bytes);
          continue;
        }
        ++compared;
        if (bytes != reference[k]) {
          ++mismatches;
          if (first_bad.empty()) first_bad = fmt::format(" (first: {}/{} at {} threads)", c.name, c.files[k], t);
        }
      }
    }
  }
  fs::remove_all(root);
  return {mismatches == 0,
          fmt::format("{} of {} file comparisons against the 1-thread run differ{}", mismatches, compared, first_bad)};
}

}  // namespace

int main() {
  std::setvbuf(stdout, nullptr, _IONBF, 0);
  const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria{
      {"profile closed form", criterion1},
      {"first-integral conservation", criterion2},
      {"attainable limits of the Cantor nonlinearity", criterion3},
      {"quarter-plane convergence to the profile", criterion4},
      {"half-plane convergence to a constant", criterion5},
      {"half-plane limit above the first positive zero", criterion6},
      {"radial subsolution bubble", criterion7},
      {"principal Dirichlet eigenpair", criterion8},
      {"sliding lower bound", criterion9},
      {"periodic surrogate sweeps", criterion10},
      {"translation semiflow laws", criterion11},
      {"thread-count determinism", criterion12}};
  int failed = 0;
  for (std::size_t k = 0; k < criteria.size(); ++k) {
    Outcome o;
    try {
      o = criteria[k].second();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    if (!o.pass) ++failed;
    std::printf("%s criterion %zu (%s): %s\n", o.pass ? "PASS" : "FAIL", k + 1, criteria[k].first, o.detail.c_str());
  }
  std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failed, criteria.size());
  return failed == 0 ? 0 : 1;
}
