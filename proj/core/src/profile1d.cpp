#include "ellab/profile1d.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>

#include <fmt/format.h>

#include "ellab/error.hpp"
#include "ellab/ode.hpp"
#include "ellab/parallel.hpp"
#include "ellab/quadrature.hpp"

namespace ellab {

namespace {

// Below this, 2(F(z) - F(s)) is treated as vanished: the profile cannot pass s.
constexpr double kPhiFloor = 1e-13;

struct FirstIntegral {
  const Nonlinearity& nl;
  double z;
  // 2 (F(z) - F(s)) computed as a direct integral over [s, z].
  double phi(double s) const { return 2.0 * nl.integral(s, z); }
  double slope(double s) const { return std::sqrt(std::max(phi(s), 0.0)); }
  // xi(b) - xi(a) along the profile.
  double travel(double a, double b) const {
    const auto cuts = nl.breakpoints(a, b);
    // Close to z, phi is a tiny integral whose relative error grows like
    // eps z / (z - s); the relative floor keeps the driver above that noise.
    return integrate([this](double s) { return 1.0 / std::sqrt(phi(s)); }, a, b, cuts, 1e-13, 1e-9).value;
  }
};

double find_stall(const FirstIntegral& fi, double z) {
  constexpr int scan = 4096;
  double prev = 0.0;
  for (int k = 0; k < scan; ++k) {
    const double s = z * k / scan;
    if (fi.phi(s) <= kPhiFloor) {
      if (k == 0) return 0.0;
      double lo = prev, hi = s;
      for (int it = 0; it < 200 && hi - lo > 1e-16 * z; ++it) {
        const double mid = 0.5 * (lo + hi);
        (fi.phi(mid) <= kPhiFloor ? hi : lo) = mid;
      }
      return hi;
    }
    prev = s;
  }
  return z;
}

Profile1D zero_profile(double xi_max, int n) {
  Profile1D p;
  p.xi.resize(n);
  for (int i = 0; i < n; ++i) p.xi[i] = xi_max * i / (n - 1);
  p.values.assign(n, 0.0);
  p.slopes.assign(n, 0.0);
  p.crosscheck_extent = xi_max;
  p.exit_xi = 0.0;
  return p;
}

double hermite(double x0, double x1, double y0, double y1, double d0, double d1, double x) {
  const double h = x1 - x0;
  const double t = (x - x0) / h;
  const double t2 = t * t, t3 = t2 * t;
  return (2 * t3 - 3 * t2 + 1) * y0 + (t3 - 2 * t2 + t) * h * d0 + (-2 * t3 + 3 * t2) * y1 +
         (t3 - t2) * h * d1;
}

double hermite_slope(double x0, double x1, double y0, double y1, double d0, double d1, double x) {
  const double h = x1 - x0;
  const double t = (x - x0) / h;
  const double t2 = t * t;
  return ((6 * t2 - 6 * t) * y0 + (3 * t2 - 4 * t + 1) * h * d0 + (-6 * t2 + 6 * t) * y1 +
          (3 * t2 - 2 * t) * h * d1) /
         h;
}

}  // namespace

double Profile1D::value_at(double x) const {
  if (xi.empty()) throw InputError("empty profile");
  if (x <= 0.0) return values.front();
  if (x >= xi.back()) {
    const double gap = limit - values.back();
    if (gap <= 0.0) return values.back();
    const double rate = tail_rate > 0.0 ? tail_rate : slopes.back() / gap;
    return limit - gap * std::exp(-rate * (x - xi.back()));
  }
  const double dx = spacing();
  const std::size_t k = std::min(static_cast<std::size_t>(x / dx), xi.size() - 2);
  return hermite(xi[k], xi[k + 1], values[k], values[k + 1], slopes[k], slopes[k + 1], x);
}

double Profile1D::slope_at(double x) const {
  if (xi.empty()) throw InputError("empty profile");
  if (x >= xi.back()) {
    const double gap = limit - values.back();
    if (gap <= 0.0) return 0.0;
    const double rate = tail_rate > 0.0 ? tail_rate : slopes.back() / gap;
    return rate * gap * std::exp(-rate * (x - xi.back()));
  }
  if (x <= 0.0) return slopes.front();
  const double dx = spacing();
  const std::size_t k = std::min(static_cast<std::size_t>(x / dx), xi.size() - 2);
  return hermite_slope(xi[k], xi[k + 1], values[k], values[k + 1], slopes[k], slopes[k + 1], x);
}

double shoot_slope(const Nonlinearity& nl, double z) {
  const double Fz = nl.antiderivative(z);
  if (Fz < 0.0)
    throw InfeasibleError(fmt::format("F({}) = {} < 0: no bounded profile with this limit", z, Fz));
  return std::sqrt(2.0 * Fz);
}

Profile1D compute_profile(const Nonlinearity& nl, double z, double xi_max, int n,
                          const ProfileOptions& opt) {
  if (n < 16) throw InputError(fmt::format("compute_profile: n must be >= 16, got {}", n));
  if (!(xi_max > 0.0)) throw InputError("compute_profile: xi_max must be positive");
  if (!(z >= 0.0 && z <= nl.s_max()))
    throw InputError(fmt::format("compute_profile: z = {} outside [0, {}]", z, nl.s_max()));
  if (std::abs(nl(z)) > opt.tol_f)
    throw InputError(fmt::format("compute_profile: f({}) = {} is not a zero", z, nl(z)));

  if (z == 0.0) return zero_profile(xi_max, n);

  Profile1D p;
  p.z = z;
  p.slope0 = shoot_slope(nl, z);
  const FirstIntegral fi{nl, z};
  p.limit = find_stall(fi, z);
  p.attains_limit = p.limit == z;
  const double limit = p.limit;

  p.xi.resize(n);
  p.values.resize(n);
  p.slopes.resize(n);
  const double dxi = xi_max / (n - 1);
  for (int i = 0; i < n; ++i) p.xi[i] = i == n - 1 ? xi_max : dxi * i;
  p.values[0] = 0.0;
  p.slopes[0] = p.slope0;

  int exit_node = n;
  if (limit <= opt.exit_tol) exit_node = 0;
  for (int i = 0; i + 1 < n && exit_node == n; ++i) {
    const double vc = p.values[i];
    const double step = p.xi[i + 1] - p.xi[i];
    double lo = vc, hi = limit;
    double v = vc + step * p.slopes[i];
    if (!(v < limit)) v = vc + 0.5 * (limit - vc);
    for (int it = 0; it < 80; ++it) {
      const double g = fi.travel(vc, v) - step;
      if (std::abs(g) <= 1e-14 * std::max(1.0, step)) break;
      (g > 0.0 ? hi : lo) = v;
      double next = v - g * fi.slope(v);
      if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
      if (next == v || hi - lo <= 4 * std::numeric_limits<double>::epsilon() * limit) break;
      v = next;
    }
    p.values[i + 1] = v;
    p.slopes[i + 1] = fi.slope(v);
    if (limit - v <= opt.exit_tol) exit_node = i + 1;
  }

  if (exit_node < n) {
    const double gap = limit - p.values[exit_node];
    p.exit_xi = p.xi[exit_node];
    p.tail_rate = gap > 0.0 ? p.slopes[exit_node] / gap : 0.0;
    for (int i = exit_node + 1; i < n; ++i) {
      const double g = gap * std::exp(-p.tail_rate * (p.xi[i] - p.exit_xi));
      p.values[i] = limit - g;
      p.slopes[i] = p.tail_rate * g;
    }
  } else {
    p.exit_xi = xi_max;
    const double gap = limit - p.values.back();
    p.tail_rate = gap > 0.0 ? p.slopes.back() / gap : 0.0;
  }
  p.tail_bound = limit - p.values.back();

  // Independent route: shoot the ODE (V, W)' = (W, -f(V)) from (0, slope0).
  int last = 0;
  while (last + 1 < n && limit - p.values[last + 1] >= opt.crosscheck_gap) ++last;
  p.crosscheck_extent = p.xi[last];
  if (last > 0) {
    const ode::Rhs<2> rhs = [&nl](double, const ode::State<2>& y) {
      return ode::State<2>{y[1], -nl(y[0])};
    };
    ode::Options oo;
    oo.tol = opt.ode_tol;
    oo.max_step = std::max(dxi, 1e-3);
    const std::span<const double> outs(p.xi.data(), static_cast<std::size_t>(last) + 1);
    const auto run = ode::integrate<2>(rhs, 0.0, {0.0, p.slope0}, p.xi[last], outs, {}, oo);
    double dev = 0.0;
    for (std::size_t k = 0; k < run.outputs.size(); ++k)
      dev = std::max(dev, std::abs(run.outputs[k].y[0] - p.values[k]));
    if (run.outputs.size() < outs.size()) dev = std::numeric_limits<double>::infinity();
    p.crosscheck_deviation = dev;
  }
  return p;
}

std::vector<Profile1D> compute_profiles(const Nonlinearity& nl, std::span<const double> zs,
                                        double xi_max, int n, int threads,
                                        const ProfileOptions& opt) {
  std::vector<Profile1D> out(zs.size());
  parallel_for(zs.size(), threads, [&](std::size_t k) { out[k] = compute_profile(nl, zs[k], xi_max, n, opt); });
  return out;
}

ProbeReport disconnectedness_probe(const Nonlinearity& nl, double z, double delta, int sign,
                                   double xi_max) {
  if (!(delta >= 0.0)) throw InputError("disconnectedness_probe: delta must be >= 0");
  if (sign != 1 && sign != -1) throw InputError("disconnectedness_probe: sign must be +1 or -1");
  if (!(xi_max > 0.0)) throw InputError("disconnectedness_probe: xi_max must be positive");
  ProbeReport rep;
  rep.z = z;
  rep.delta = delta;
  rep.sign = sign;
  rep.slope = shoot_slope(nl, z) + sign * delta;

  const ode::Rhs<2> rhs = [&nl](double, const ode::State<2>& y) {
    return ode::State<2>{y[1], -nl(y[0])};
  };
  const double crossing_level = z + 1e-9 * std::max(1.0, z);
  const std::vector<ode::Event<2>> events{
      {[crossing_level](double, const ode::State<2>& y) { return y[0] - crossing_level; }, +1},
      {[](double, const ode::State<2>& y) { return y[1]; }, -1},
      {[](double, const ode::State<2>& y) { return y[0]; }, -1},
  };
  ode::Options oo;
  oo.max_step = 0.05;
  const auto run = ode::integrate<2>(rhs, 0.0, {0.0, rep.slope}, xi_max, {}, events, oo);
  rep.final_xi = run.t_final;
  rep.final_value = run.y_final[0];
  if (run.event_index) {
    rep.event_xi = run.event_t;
    rep.event_value = run.event_y[0];
    switch (*run.event_index) {
      case 0: {
        rep.event = ProbeEvent::crossed_limit;
        // Follow the orbit on until it turns or the run ends.
        const std::vector<ode::Event<2>> turn{{[](double, const ode::State<2>& y) { return y[1]; }, -1}};
        const double horizon = std::max(xi_max, run.event_t + 1.0);
        const auto more = ode::integrate<2>(rhs, run.event_t, run.event_y, horizon, {}, turn, oo);
        const double peak = more.event_index ? more.event_y[0] : more.y_final[0];
        rep.continues_upward = peak > z + 1e-6 * std::max(1.0, z);
        rep.final_value = peak;
        rep.final_xi = more.event_index ? more.event_t : more.t_final;
        break;
      }
      case 1:
        rep.event = rep.event_value < z ? ProbeEvent::turned_back : ProbeEvent::crossed_limit;
        break;
      default:
        rep.event = ProbeEvent::left_below_zero;
        break;
    }
  } else {
    rep.event = ProbeEvent::none;
    rep.inconclusive = true;
  }

  if (delta == 0.0) {
    const int n = std::max(64, static_cast<int>(std::ceil(xi_max / 0.01)) + 1);
    const Profile1D prof = compute_profile(nl, z, xi_max, n);
    std::vector<double> outs(prof.xi.begin(), prof.xi.end());
    const auto shot = ode::integrate<2>(rhs, 0.0, {0.0, rep.slope}, xi_max, outs, {}, oo);
    double dev = 0.0;
    for (std::size_t k = 0; k < shot.outputs.size(); ++k)
      dev = std::max(dev, std::abs(shot.outputs[k].y[0] - prof.values[k]));
    rep.profile_deviation = dev;
  }
  return rep;
}

double profile_residual(const Profile1D& p, const Nonlinearity& nl) {
  if (p.values.size() < 3) throw InputError("profile_residual needs at least 3 nodes");
  const double h = p.spacing();
  double r = 0.0;
  for (std::size_t i = 1; i + 1 < p.values.size(); ++i) {
    const double d2 = (p.values[i + 1] - 2.0 * p.values[i] + p.values[i - 1]) / (h * h);
    r = std::max(r, std::abs(d2 + nl(p.values[i])));
  }
  return r;
}

double default_residual_tol(const Profile1D& p) {
  const double h = p.xi_max() / static_cast<double>(p.xi.size());
  return 10.0 * h * h;
}

void write_profile_csv(std::ostream& out, const Profile1D& p) {
  out << "xi,V,W\n";
  for (std::size_t i = 0; i < p.xi.size(); ++i)
    out << fmt::format("{:.17g},{:.17g},{:.17g}\n", p.xi[i], p.values[i], p.slopes[i]);
}

Profile1D read_profile_csv(std::istream& in, double z) {
  std::string line;
  if (!std::getline(in, line) || line != "xi,V,W") throw InputError("profile CSV: expected header 'xi,V,W'");
  Profile1D p;
  p.z = z;
  p.limit = z;
  int lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    std::istringstream row(line);
    double a, b, c;
    char c1, c2;
    if (!(row >> a >> c1 >> b >> c2 >> c) || c1 != ',' || c2 != ',')
      throw InputError(fmt::format("profile CSV:{}: malformed row", lineno));
    p.xi.push_back(a);
    p.values.push_back(b);
    p.slopes.push_back(c);
  }
  if (p.xi.size() < 2) throw InputError("profile CSV: need at least two rows");
  p.slope0 = p.slopes.front();
  p.exit_xi = p.xi.back();
  return p;
}

const char* to_string(ProbeEvent e) {
  switch (e) {
    case ProbeEvent::none: return "none";
    case ProbeEvent::crossed_limit: return "crossed_limit";
    case ProbeEvent::turned_back: return "turned_back";
    case ProbeEvent::left_below_zero: return "left_below_zero";
  }
  return "?";
}

}  // namespace ellab
