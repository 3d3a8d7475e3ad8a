#include "ellab/liouville.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>

#include <fmt/format.h>

#include "ellab/elliptic.hpp"
#include "ellab/error.hpp"
#include "ellab/ode.hpp"
#include "ellab/parallel.hpp"
#include "ellab/stencil.hpp"

namespace ellab {

namespace {

constexpr std::array<std::array<int, 2>, 8> kBoxModes{
    {{0, 0}, {1, 0}, {0, 1}, {1, 1}, {1, -1}, {2, 0}, {0, 2}, {2, 1}}};

double residual_max(const Stencil& st, const std::vector<double>& v, const Nonlinearity& nl) {
  double m = 0.0;
  for (std::size_t k = 0; k < st.size(); ++k) m = std::max(m, std::abs(st.laplacian(v, k) + nl(v[st.node_of[k]])));
  return m;
}

// Explicit Euler on u_t = Lap_h u + f(u) until the update drops below `steady`.
int parabolic_flow(Field& u, const Nonlinearity& nl, int max_steps, double steady) {
  const Stencil st(u);
  const double dt = 0.2 * u.grid().h * u.grid().h;
  std::vector<double>& v = u.values();
  std::vector<double> rate(st.size());
  for (int step = 1; step <= max_steps; ++step) {
    double update = 0.0;
    for (std::size_t k = 0; k < st.size(); ++k) {
      rate[k] = st.laplacian(v, k) + nl(v[st.node_of[k]]);
      update = std::max(update, dt * std::abs(rate[k]));
    }
    if (!std::isfinite(update)) return -step;
    for (std::size_t k = 0; k < st.size(); ++k) v[st.node_of[k]] += dt * rate[k];
    if (update < steady) return step;
  }
  return -max_steps;
}

SweepReport aggregate(SweepDomain domain, std::uint64_t seed, std::vector<TrialRecord> recs) {
  SweepReport rep;
  rep.domain = domain;
  rep.seed = seed;
  rep.trials = static_cast<int>(recs.size());
  rep.banner = domain == SweepDomain::periodic_box
                   ? "surrogate domain: a periodic box stands in for the whole plane; evidence, not proof"
                   : "surrogate domain: a laterally periodic strip of finite height stands in for the half-plane; "
                     "evidence, not proof";
  for (const auto& r : recs) {
    if (!r.converged) continue;
    ++rep.converged;
    rep.max_deviation = std::max(rep.max_deviation, r.deviation);
    if (domain == SweepDomain::periodic_box) {
      rep.zero_distance = std::max(rep.zero_distance, r.zero_distance);
      if (r.constant) ++rep.constant_count;
    } else {
      rep.max_lateral_variation = std::max(rep.max_lateral_variation, r.lateral_variation);
      rep.max_profile_distance = std::max(rep.max_profile_distance, r.profile_distance);
      if (r.one_dimensional) ++rep.constant_count;
    }
  }
  rep.records = std::move(recs);
  return rep;
}

}  // namespace

void check_sweep_precondition(const Nonlinearity& nl) {
  const ZeroSet E = zero_set(nl);
  if (E.empty()) throw InputError(fmt::format("{} has no zeros on [0, {}]; no bounded solutions to classify", nl.name(), nl.s_max()));
  const HypothesisReport hyp = check_hypotheses(nl);
  const bool h2 = hyp.h2 == Verdict::holds;
  const bool h13 = hyp.h1 == Verdict::holds && hyp.h3 == Verdict::holds;
  if (!h2 && !h13)
    throw InputError(fmt::format("{} satisfies neither the nonnegativity hypothesis nor the sign-pattern pair", nl.name()));
}

Field random_initial_field(const Grid2D& grid, const BoundarySpec& bc, std::uint64_t seed, int trial,
                           double amplitude_max) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(trial)};
  std::mt19937_64 rng(seq);
  std::uniform_real_distribution<double> amp(0.0, amplitude_max);
  std::uniform_real_distribution<double> phase(0.0, 2.0 * std::numbers::pi);
  std::array<double, 8> a{}, th{};
  for (int m = 0; m < 8; ++m) {
    a[m] = amp(rng);
    th[m] = phase(rng);
  }
  Field u(grid, bc);
  const bool box = bc.x2 == AxisKind::periodic;
  for (int i = 0; i < u.nx(); ++i)
    for (int j = 0; j < u.ny(); ++j) {
      const double x1 = u.x1(i) / grid.L1;
      const double x2 = u.x2(j) / grid.L2;
      double s = 0.0;
      for (int m = 0; m < 8; ++m) {
        // Box: the 8 lowest wave vectors; strip: lateral modes 0..7.
        const double arg = box ? kBoxModes[m][0] * x1 + kBoxModes[m][1] * x2 : m * x1;
        s += a[m] * (m == 0 ? 1.0 : std::cos(2.0 * std::numbers::pi * arg + th[m]));
      }
      s = std::max(s, 0.0);
      if (!box) s *= 1.0 - std::exp(-u.x2(j));
      u(i, j) = s;
    }
  u.apply_boundary();
  return u;
}

TrialRecord liouville_trial(const Nonlinearity& nl, Field& u, const SweepOptions& opt) {
  TrialRecord rec;
  const Field start = u;
  SolveOptions so;
  so.tol = opt.newton_tol;
  so.max_newton_iterations = opt.newton_iterations;
  so.threads = 1;
  bool done = false;
  try {
    Field sol = newton_solve(start, nl, so);
    const auto& c = *sol.certificate();
    if (c.residual <= opt.newton_tol && !c.maximum_principle_violation) {
      u = std::move(sol);
      rec.method = "newton";
      rec.iterations = c.iterations;
      done = true;
    }
  } catch (const NumericError&) {
  }
  if (!done) {
    u = start;
    const int steps = parabolic_flow(u, nl, opt.max_parabolic_steps, opt.steady_update);
    rec.method = "parabolic";
    rec.iterations = std::abs(steps);
  }
  const Stencil st(u);
  rec.residual = residual_max(st, u.values(), nl);
  rec.converged = std::isfinite(rec.residual) && rec.residual <= opt.converged_tol;
  if (!rec.converged && rec.method == "parabolic" && rec.iterations >= opt.max_parabolic_steps) rec.method = "none";

  const auto [mn, mx] = std::minmax_element(u.values().begin(), u.values().end());
  rec.min = *mn;
  rec.max = *mx;
  rec.deviation = *mx - *mn;
  double sum = 0.0;
  for (double x : u.values()) sum += x;
  rec.mean = sum / static_cast<double>(u.values().size());
  rec.constant = rec.deviation < opt.const_tol;
  return rec;
}

SweepReport periodic_box_sweep(const Nonlinearity& nl, int trials, const Grid2D& box, std::uint64_t seed,
                               const SweepOptions& opt) {
  if (trials < 1) throw InputError("sweep needs at least one trial");
  check_sweep_precondition(nl);
  const ZeroSet E = zero_set(nl);
  std::vector<TrialRecord> recs(trials);
  std::vector<Field> fields(opt.keep_fields ? trials : 0, Field(box, BoundarySpec::periodic_box()));
  parallel_for(static_cast<std::size_t>(trials), opt.threads, [&](std::size_t t) {
    Field u = random_initial_field(box, BoundarySpec::periodic_box(), seed, static_cast<int>(t), opt.amplitude_max);
    TrialRecord rec = liouville_trial(nl, u, opt);
    rec.trial = static_cast<int>(t);
    rec.zero_distance = E.distance(rec.mean);
    recs[t] = rec;
    if (opt.keep_fields) fields[t] = std::move(u);
  });
  SweepReport rep = aggregate(SweepDomain::periodic_box, seed, std::move(recs));
  rep.fields = std::move(fields);
  return rep;
}

std::vector<Profile1D> strip_profiles(const Nonlinearity& nl, const SweepOptions& opt) {
  std::vector<double> zs = compute_Zf(nl).points;
  return compute_profiles(nl, zs, opt.profile_xi_max, opt.profile_n, 1);
}

void classify_strip(const Field& u, const std::vector<Profile1D>& profiles, double const_tol, TrialRecord& rec) {
  rec.lateral_variation = 0.0;
  for (int j = 0; j < u.ny(); ++j) {
    double lo = std::numeric_limits<double>::infinity(), hi = -lo;
    for (int i = 0; i < u.nx(); ++i) {
      lo = std::min(lo, u(i, j));
      hi = std::max(hi, u(i, j));
    }
    rec.lateral_variation = std::max(rec.lateral_variation, hi - lo);
  }
  rec.one_dimensional = rec.lateral_variation < const_tol;
  rec.profile_distance = std::numeric_limits<double>::infinity();
  for (const auto& p : profiles) {
    double d = 0.0;
    for (int j = 0; j < u.ny(); ++j) {
      const double V = p.value_at(u.x2(j));
      for (int i = 0; i < u.nx(); ++i) d = std::max(d, std::abs(u(i, j) - V));
    }
    if (d < rec.profile_distance) {
      rec.profile_distance = d;
      rec.matched_z = p.z;
    }
  }
}

SweepReport halfspace_strip_sweep(const Nonlinearity& nl, int trials, const Grid2D& strip, std::uint64_t seed,
                                  const SweepOptions& opt) {
  if (trials < 1) throw InputError("sweep needs at least one trial");
  check_sweep_precondition(nl);
  const std::vector<Profile1D> profiles = strip_profiles(nl, opt);
  std::vector<TrialRecord> recs(trials);
  std::vector<Field> fields(opt.keep_fields ? trials : 0, Field(strip, BoundarySpec::strip()));
  parallel_for(static_cast<std::size_t>(trials), opt.threads, [&](std::size_t t) {
    Field u = random_initial_field(strip, BoundarySpec::strip(), seed, static_cast<int>(t), opt.amplitude_max);
    TrialRecord rec = liouville_trial(nl, u, opt);
    rec.trial = static_cast<int>(t);
    classify_strip(u, profiles, opt.const_tol, rec);
    recs[t] = rec;
    if (opt.keep_fields) fields[t] = std::move(u);
  });
  SweepReport rep = aggregate(SweepDomain::halfspace_strip, seed, std::move(recs));
  rep.fields = std::move(fields);
  return rep;
}

FloorCurve parabolic_floor(const Nonlinearity& nl, double m, double t_max, int samples) {
  if (!(m >= 0.0)) throw InputError("floor start m must be nonnegative");
  if (!(t_max > 0.0)) throw InputError("t_max must be positive");
  if (samples < 2) throw InputError("need at least two samples");
  FloorCurve c;
  for (int k = 0; k < samples; ++k) c.t.push_back(t_max * k / (samples - 1));
  if (nl(m) == 0.0) {
    c.xi.assign(samples, m);
    return c;
  }
  using S = ode::State<1>;
  const ode::Rhs<1> rhs = [&](double, const S& y) -> S { return {nl(y[0])}; };
  const ode::Event<1> blow[] = {{[](double, const S& y) { return std::abs(y[0]) - 1e12; }, +1}};
  ode::Options oo;
  oo.tol = 1e-12;
  const auto res = ode::integrate<1>(rhs, 0.0, S{m}, t_max, c.t, blow, oo);
  for (const auto& s : res.outputs) c.xi.push_back(s.y[0]);
  if (res.event_index || res.non_finite || res.step_underflow) {
    c.blow_up = true;
    c.blow_up_time = res.event_index ? res.event_t : res.t_final;
    c.t.resize(c.xi.size());
  }
  return c;
}

const char* to_string(SweepDomain d) { return d == SweepDomain::periodic_box ? "periodic-box" : "halfspace-strip"; }

}  // namespace ellab
