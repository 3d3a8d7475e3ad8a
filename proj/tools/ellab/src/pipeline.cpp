#include "ellab/cli/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>

#include <fmt/format.h>
#include <fmt/ostream.h>

#include "ellab/cli/reports.hpp"
#include "ellab/cli/svg.hpp"
#include "ellab/cli/u0.hpp"
#include "ellab/elliptic.hpp"
#include "ellab/error.hpp"

namespace ellab::cli {

using nlohmann::json;

namespace {

SolveMethod solve_method(const std::string& m) {
  if (m == "monotone") return SolveMethod::monotone;
  if (m == "newton") return SolveMethod::newton;
  return SolveMethod::automatic;
}

// Nonlinearity whose range covers the candidate cap.
Nonlinearity covering(const Nonlinearity& nl, double cap) { return nl.s_max() >= cap ? nl : nl.with_s_max(cap); }

}  // namespace

ProblemKind problem_kind(const std::string& kind) {
  if (kind == "quarter") return ProblemKind::quarter;
  if (kind == "half") return ProblemKind::half;
  throw InputError(fmt::format("unknown problem kind '{}'", kind));
}

Context::Context(ExperimentConfig config, std::ostream& log_stream)
    : cfg(std::move(config)),
      nl(Nonlinearity::parse(cfg.nonlinearity.name, cfg.nonlinearity.s_max)),
      out(cfg.output.dir),
      log(log_stream) {
  out.write_text("config.json", serialize(cfg));
}

void Context::check(std::string name, bool pass, std::string detail) {
  fmt::print(log, "{} {}: {}\n", pass ? "PASS" : "FAIL", name, detail);
  checks.push_back({std::move(name), pass, std::move(detail)});
}

json step_analyze(Context& ctx) {
  const json j = analysis_json(ctx.nl);
  ctx.out.write_json("analysis.json", j);
  const auto& h = j["hypotheses"];
  fmt::print(ctx.log, "nonlinearity {}: zeros {}, profile limits {}, h1 {} (mu = {}), h2 {}, h3 {}\n",
             ctx.nl.name(), j["zero_set"]["points"].dump(), j["profile_limits"]["points"].dump(),
             h["h1"]["verdict"].get<std::string>(), h["h1"]["mu"].get<double>(), h["h2"]["verdict"].get<std::string>(),
             h["h3"]["verdict"].get<std::string>());
  return j;
}

json step_zf(Context& ctx) {
  const ZeroSet Z = compute_Zf(covering(ctx.nl, ctx.cfg.analysis.M_cap));
  const json j{{"nonlinearity", ctx.nl.name()},
               {"points", Z.points},
               {"borderline", Z.borderline},
               {"origin_by_convention", Z.origin_by_convention}};
  ctx.out.write_json("zf.json", j);
  fmt::print(ctx.log, "profile limits: {}\n", j["points"].dump());
  return j;
}

std::vector<Profile1D> step_profiles(Context& ctx) {
  const auto& a = ctx.cfg.analysis;
  std::vector<double> zs = a.profile_z;
  if (zs.empty()) {
    const double cap = a.M_cap * (1.0 + 1e-12) + 1e-12;
    for (double z : compute_Zf(covering(ctx.nl, a.M_cap)).points)
      if (z <= cap) zs.push_back(z);
  }
  const Nonlinearity nl = covering(ctx.nl, zs.empty() ? 0.0 : *std::max_element(zs.begin(), zs.end()));
  std::vector<Profile1D> profiles = compute_profiles(nl, zs, a.profile_xi_max, a.profile_n, ctx.threads());
  json list = json::array();
  double worst = 0.0;
  for (const auto& p : profiles) {
    const std::string file = profile_file_name(p.z);
    ctx.out.write_text(file, profile_csv(p));
    list.push_back(profile_json(p, nl, file));
    worst = std::max(worst, first_integral_error(p, nl));
  }
  ctx.out.write_json("profiles.json", {{"nonlinearity", ctx.nl.name()}, {"profiles", list}});
  fmt::print(ctx.log, "profiles: {} computed, worst first-integral error {:.3e}\n", profiles.size(), worst);
  return profiles;
}

Field step_solve(Context& ctx, ProblemKind kind) {
  const auto& d = ctx.cfg.domain;
  const auto& s = ctx.cfg.solver;
  const std::string kind_name = to_string(kind);
  const Grid2D grid = Grid2D::make(d.L1, d.L2, d.h);
  const BoundarySpec bc = make_boundary(kind_name, grid, parse_u0(d.u0), ctx.nl, d.right, d.top);
  SolveOptions opt;
  opt.method = solve_method(s.method);
  opt.tol = s.tol;
  opt.max_monotone_iterations = s.max_monotone_iterations;
  opt.max_newton_iterations = s.max_newton_iterations;
  opt.threads = s.threads;
  Field u = kind == ProblemKind::quarter ? solve_quarter(ctx.nl, bc, grid, opt) : solve_half(ctx.nl, bc, grid, opt);
  ctx.out.write_text("field.csv", field_csv(u));
  ctx.out.write_json("summary.json", summary_json(u, kind_name, d.u0));
  const auto& c = *u.certificate();
  fmt::print(ctx.log, "solve {}: {} iterations ({}), residual {:.3e}, min {:.6g}\n", kind_name, c.iterations, c.method,
             c.residual, c.min_value);
  return u;
}

TrajectoryReport step_trajectory(Context& ctx, const Field& u, ProblemKind kind) {
  const auto& a = ctx.cfg.analysis;
  AttractorOptions ao;
  ao.xi_max = a.profile_xi_max;
  ao.n = a.profile_n;
  ao.threads = ctx.threads();
  const AttractorEstimate table = attractor_table(ctx.nl, a.M_cap, kind, ao);
  if (table.elements.empty())
    throw InfeasibleError(fmt::format("no candidate limits in [0, {}]; raise analysis.M_cap", a.M_cap));
  OmegaOptions oo;
  oo.h_count = a.h_count;
  oo.conv_tol = a.conv_tol;
  oo.margin_factor = a.margin_factor;
  oo.window_frac = a.window_frac;
  oo.M_windows = a.M_windows;
  oo.threads = ctx.threads();
  const TrajectoryReport r = omega_limit(u, table.elements, oo);
  const json j = trajectory_json(r, kind);
  ctx.out.write_json("trajectory.json", j);
  if (ctx.cfg.output.plot) ctx.out.write_text("trajectory.svg", render_trajectory_svg(j));
  if (r.detected_z)
    fmt::print(ctx.log, "trajectory: converges to z = {} (final distance {:.3e}, margin {:.3g})\n", *r.detected_z,
               r.final_distance, r.margin_ratio);
  else
    fmt::print(ctx.log, "trajectory: no unique limit (final distance {:.3e}, margin {:.3g})\n", r.final_distance,
               r.margin_ratio);
  return r;
}

RadialBubble step_bubble(Context& ctx) {
  const auto& b = ctx.cfg.analysis.bubble;
  const Nonlinearity nl = covering(ctx.nl, b.z);
  RadialBubble bubble = radial_bubble(nl, b.z, b.eps, b.N);
  std::optional<BubbleEnergy> energy;
  if (bubble.feasible) energy = bubble_energy(bubble, nl, b.z, b.growth_radii);
  ctx.out.write_json("bubble.json", bubble_json(bubble, energy ? &*energy : nullptr));
  if (bubble.feasible) {
    ctx.out.write_text("bubble.csv", bubble_csv(bubble));
    fmt::print(ctx.log, "bubble: R' = {:.6g}, v(0) = {:.6g}, energy exponents {:.3f} vs {:.3f}\n", bubble.R_prime,
               bubble.v0, energy->ramp_exponent, energy->bound_exponent);
  } else {
    fmt::print(ctx.log, "bubble: infeasible ({})\n", bubble.message);
  }
  return bubble;
}

Eigenpair step_eigen(Context& ctx) {
  const auto& e = ctx.cfg.analysis.eigen;
  const Eigenpair pair = dirichlet_eigenpair(e.N, e.R, e.n);
  ctx.out.write_json("eigen.json", eigen_json(pair));
  ctx.out.write_text("eigen.csv", eigen_csv(pair));
  fmt::print(ctx.log, "eigenpair: lambda = {:.10g} (Rayleigh {:.10g})\n", pair.lambda, pair.rayleigh);
  return pair;
}

SlidingReport step_slide(Context& ctx, const Field& u) {
  const auto& s = ctx.cfg.analysis.slide;
  const RadialBubble b = step_bubble(ctx);
  if (!b.feasible) throw InfeasibleError("sliding needs a feasible bubble: " + b.message);
  const Point2 from{s.from[0], s.from[1]}, to{s.to[0], s.to[1]};
  const SlidingReport r = sliding_verify(u, b, from, to, s.steps);
  ctx.out.write_json("slide.json", slide_json(r, b, from, to));
  fmt::print(ctx.log, "slide: {} placements, min margin {:.4g}, certified lower bound {:.6g}\n", r.steps, r.min_margin,
             r.lower_bound);
  return r;
}

std::vector<SweepReport> step_sweep(Context& ctx) {
  const auto& w = ctx.cfg.analysis.sweep;
  SweepOptions opt;
  opt.threads = ctx.threads();
  opt.keep_fields = ctx.cfg.output.dump_fields;
  std::vector<SweepReport> reps;
  if (w.kind != "halfspace-strip")
    reps.push_back(periodic_box_sweep(ctx.nl, w.trials, Grid2D::make(w.box_L, w.box_L, w.h), ctx.cfg.seed, opt));
  if (w.kind != "periodic-box")
    reps.push_back(
        halfspace_strip_sweep(ctx.nl, w.trials, Grid2D::make(w.strip_L1, w.strip_height, w.h), ctx.cfg.seed, opt));
  json list = json::array();
  for (const auto& r : reps) {
    list.push_back(sweep_json(r));
    fmt::print(ctx.log, "sweep {}: {}/{} converged; {}\n", to_string(r.domain), r.converged, r.trials, r.banner);
    for (std::size_t k = 0; k < r.fields.size(); ++k)
      ctx.out.write_text(fmt::format("sweep_fields/{}_trial_{:02d}.csv", to_string(r.domain), k), field_csv(r.fields[k]));
  }
  ctx.out.write_json("sweep.json", {{"seed", ctx.cfg.seed}, {"sweeps", list}});
  return reps;
}

void run_pipeline(Context& ctx) {
  const auto& cfg = ctx.cfg;
  const ProblemKind kind = problem_kind(cfg.domain.kind);
  const json analysis = step_analyze(ctx);
  const auto& h1 = analysis["hypotheses"]["h1"];
  const bool h1_holds = h1["verdict"] == "holds";
  const double mu = h1["mu"].get<double>();

  if (kind == ProblemKind::quarter) {
    const auto profiles = step_profiles(ctx);
    double worst = 0.0;
    for (const auto& p : profiles) worst = std::max(worst, first_integral_error(p, covering(ctx.nl, p.z)));
    ctx.check("profile first integral", worst < 1e-8,
              fmt::format("max |W^2 - 2(F(z) - F(V))| = {:.3e} over {} profiles", worst, profiles.size()));
  } else {
    step_zf(ctx);
  }

  const Field u = step_solve(ctx, kind);
  const auto& cert = *u.certificate();
  ctx.check("discrete solve", cert.residual <= cfg.solver.tol && !cert.maximum_principle_violation,
            fmt::format("residual {:.3e} after {} iterations ({}), min value {:.3g}", cert.residual, cert.iterations,
                        cert.method, cert.min_value));

  const TrajectoryReport tr = step_trajectory(ctx, u, kind);
  const bool nontrivial = *std::max_element(u.boundary().left.begin(), u.boundary().left.end()) > 0.0;
  ctx.check("unique limit along shifts", tr.converged,
            tr.detected_z ? fmt::format("z = {} at final distance {:.3e}, {}", *tr.detected_z, tr.final_distance,
                                        std::isfinite(tr.margin_ratio)
                                            ? fmt::format("runner-up {:.3g}x farther", tr.margin_ratio)
                                            : std::string("no other candidate comes close"))
                          : fmt::format("final distance {:.3e}, margin {:.3g}", tr.final_distance, tr.margin_ratio));
  if (tr.detected_z) {
    const double z = *tr.detected_z;
    if (kind == ProblemKind::quarter) {
      if (h1_holds && nontrivial)
        ctx.check("profile limit is the first positive zero", std::abs(z - mu) <= 1e-6 * std::max(1.0, mu),
                  fmt::format("detected z = {}, first positive zero {}", z, mu));
    } else {
      ctx.check("constant limit is a zero of f", std::abs(ctx.nl(z)) < 1e-6, fmt::format("|f({})| = {:.3e}", z, std::abs(ctx.nl(z))));
      ctx.check("constant limit matches the upper limit estimate", std::abs(z - tr.M_estimate) < 1e-2,
                fmt::format("z = {}, estimated upper limit {:.6g}", z, tr.M_estimate));
      if (h1_holds && nontrivial)
        ctx.check("constant limit lies at or above the first positive zero", z >= mu - 1e-6,
                  fmt::format("z = {}, first positive zero {}", z, mu));
    }
  }
  if (kind == ProblemKind::quarter && h1_holds && nontrivial) {
    const Window far{0.5 * u.grid().L1, u.grid().L1, 0.5 * u.grid().L2, u.grid().L2};
    const double inf = window_extrema(u, far).min;
    ctx.check("far-field lower bound", inf > mu - 5e-2,
              fmt::format("inf of u on [{}, {}] x [{}, {}] is {:.6g} against {}", far.x1_lo, far.x1_hi, far.x2_lo,
                          far.x2_hi, inf, mu));
  }

  if (cfg.analysis.slide.enabled) {
    const SlidingReport s = step_slide(ctx, u);
    ctx.check("sliding subsolution stays below", !s.failed && s.min_margin > 0.0,
              fmt::format("min margin {:.4g} over {} placements, u >= {:.6g} along the path", s.min_margin, s.steps,
                          s.lower_bound));
  }

  if (cfg.analysis.sweep.enabled) {
    for (const auto& r : step_sweep(ctx)) {
      if (r.domain == SweepDomain::periodic_box)
        ctx.check("periodic-box solutions are constant",
                  r.converged > 0 && r.constant_count == r.converged && r.zero_distance < 1e-3,
                  fmt::format("{}/{} converged trials constant, max distance of the value to the zero set {:.3e}",
                              r.constant_count, r.converged, r.zero_distance));
      else
        ctx.check("strip solutions are one-dimensional profiles",
                  r.converged > 0 && r.constant_count == r.converged && r.max_profile_distance < 1e-2,
                  fmt::format("{}/{} converged trials laterally constant (max variation {:.3e}), max profile distance {:.3e}",
                              r.constant_count, r.converged, r.max_lateral_variation, r.max_profile_distance));
    }
  }

  json checks = json::array();
  for (const auto& c : ctx.checks) checks.push_back({{"check", c.name}, {"pass", c.pass}, {"detail", c.detail}});
  ctx.out.write_json("checks.json", {{"checks", checks}});
}

}  // namespace ellab::cli
