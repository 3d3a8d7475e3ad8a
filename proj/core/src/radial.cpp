#include "ellab/radial.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include <fmt/format.h>

#include "ellab/error.hpp"
#include "ellab/ode.hpp"
#include "ellab/quadrature.hpp"

namespace ellab {

namespace {

// Solves a tridiagonal system (lower, diag, upper) in place (Thomas).
std::vector<double> thomas(const std::vector<double>& lo, const std::vector<double>& di,
                           const std::vector<double>& up, std::vector<double> rhs) {
  const std::size_t n = di.size();
  std::vector<double> c(n);
  double denom = di[0];
  c[0] = up[0] / denom;
  rhs[0] /= denom;
  for (std::size_t k = 1; k < n; ++k) {
    denom = di[k] - lo[k] * c[k - 1];
    c[k] = k + 1 < n ? up[k] / denom : 0.0;
    rhs[k] = (rhs[k] - lo[k] * rhs[k - 1]) / denom;
  }
  for (std::size_t k = n - 1; k-- > 0;) rhs[k] -= c[k] * rhs[k + 1];
  return rhs;
}

double fit_exponent(const std::vector<double>& x, const std::vector<double>& y) {
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  const double n = static_cast<double>(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double lx = std::log(x[i]);
    const double ly = std::log(y[i]);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
  }
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

}  // namespace

Eigenpair dirichlet_eigenpair(int N, double R, int n) {
  if (N < 1) throw InputError(fmt::format("dimension must be >= 1, got {}", N));
  if (!(R > 0.0)) throw InputError("radius must be positive");
  if (n < 32) throw InputError(fmt::format("need at least 32 radial cells, got {}", n));
  const double h = R / n;
  const double inv_h2 = 1.0 / (h * h);

  // Finite-volume rows for -(phi'' + (N-1)/r phi') on k = 0..n-1; phi_n = 0.
  std::vector<double> lo(n, 0.0), di(n), up(n, 0.0), weight(n);
  di[0] = 2.0 * N * inv_h2;
  up[0] = -2.0 * N * inv_h2;
  weight[0] = std::pow(0.5, N) / N;
  for (int k = 1; k < n; ++k) {
    const double am = std::pow((k - 0.5) / k, N - 1) * inv_h2;
    const double ap = std::pow((k + 0.5) / k, N - 1) * inv_h2;
    lo[k] = -am;
    up[k] = -ap;
    di[k] = am + ap;
    weight[k] = std::pow(static_cast<double>(k), N - 1);
  }

  Eigenpair out;
  out.N = N;
  out.R = R;
  std::vector<double> phi(n);
  for (int k = 0; k < n; ++k) phi[k] = 1.0 - std::pow(static_cast<double>(k) / n, 2);
  double lambda = 0.0;
  bool converged = false;
  for (int it = 1; it <= 500; ++it) {
    std::vector<double> x = thomas(lo, di, up, phi);
    const double x0 = x[0];
    double change = 0.0;
    for (int k = 0; k < n; ++k) {
      x[k] /= x0;
      change = std::max(change, std::abs(x[k] - phi[k]));
    }
    const double next = 1.0 / x0;
    phi.swap(x);
    out.iterations = it;
    if (it > 2 && change <= 1e-14 && std::abs(next - lambda) <= 1e-15 * next) {
      lambda = next;
      converged = true;
      break;
    }
    lambda = next;
  }
  if (!converged) throw NumericError("inverse power iteration stagnated", lambda);

  double num = 0.0, den = 0.0;
  for (int k = 0; k < n; ++k) {
    double Aphi = di[k] * phi[k];
    if (k > 0) Aphi += lo[k] * phi[k - 1];
    if (k + 1 < n) Aphi += up[k] * phi[k + 1];
    num += weight[k] * phi[k] * Aphi;
    den += weight[k] * phi[k] * phi[k];
  }
  out.lambda = lambda;
  out.rayleigh = num / den;
  out.r.resize(n + 1);
  for (int k = 0; k <= n; ++k) out.r[k] = k * h;
  out.phi = std::move(phi);
  out.phi.push_back(0.0);
  out.phi[0] = 1.0;
  return out;
}

double RadialBubble::value_at(double rho) const {
  rho = std::abs(rho);
  if (!feasible || r.empty() || rho >= R_prime) return 0.0;
  const auto it = std::upper_bound(r.begin(), r.end(), rho);
  if (it == r.begin()) return v.front();
  if (it == r.end()) return v.back();
  const std::size_t k = static_cast<std::size_t>(it - r.begin());
  const double t = (rho - r[k - 1]) / (r[k] - r[k - 1]);
  return (1.0 - t) * v[k - 1] + t * v[k];
}

RadialBubble radial_bubble(const Nonlinearity& g, double z, double eps, int N, const BubbleOptions& opt) {
  if (N < 1) throw InputError("dimension must be >= 1");
  if (!(z > 0.0)) throw InputError("bubble level z must be positive");
  if (!(eps > 0.0) || eps > z) throw InputError(fmt::format("eps must lie in (0, z], got {}", eps));
  if (std::abs(g(z)) > 1e-10) throw InputError(fmt::format("g(z) = {} is not zero", g(z)));
  for (int k = 0; k <= 1000; ++k)
    if (g(z * k / 1000.0) < -1e-12) throw InputError("g must be nonnegative on [0, z]");

  RadialBubble b;
  b.N = N;
  b.z = z;
  b.eps = eps;

  using S = ode::State<2>;
  const ode::Rhs<2> rhs = [&](double r, const S& y) -> S {
    return {y[1], -(N - 1) / r * y[1] - g(y[0])};
  };
  const ode::Event<2> events[] = {
      {[](double, const S& y) { return y[0]; }, -1},  // hits zero
      {[](double, const S& y) { return y[1]; }, +1},  // stops decreasing
  };
  ode::Options oo;
  oo.tol = opt.ode_tol;
  oo.initial_step = 1e-4;

  auto start = [&](double a) {
    const double r0 = 1e-6;
    const double ga = g(a);
    return std::pair<double, S>{r0, S{a - ga * r0 * r0 / (2.0 * N), -ga * r0 / N}};
  };

  double a = eps < z ? z - eps : 0.5 * z;
  for (int attempt = 0; attempt < 60; ++attempt) {
    if (!(g(a) > 0.0)) {
      a = 0.5 * (a + z);
      continue;
    }
    const auto [r0, y0] = start(a);
    const auto probe = ode::integrate<2>(rhs, r0, y0, opt.r_max, {}, events, oo);
    if (probe.event_index && *probe.event_index == 0) {
      const double R1 = probe.event_t;
      std::vector<double> times;
      for (int k = 1; k + 1 < opt.samples; ++k) {
        const double t = R1 * k / (opt.samples - 1);
        if (t > r0) times.push_back(t);
      }
      const auto run = ode::integrate<2>(rhs, r0, y0, opt.r_max, times, events, oo);
      if (!run.event_index || *run.event_index != 0) break;
      b.R_prime = run.event_t;
      b.r.push_back(0.0);
      b.v.push_back(a);
      b.dv.push_back(0.0);
      for (const auto& s : run.outputs) {
        if (s.t >= b.R_prime) break;
        b.r.push_back(s.t);
        b.v.push_back(s.y[0]);
        b.dv.push_back(s.y[1]);
      }
      b.r.push_back(b.R_prime);
      b.v.push_back(0.0);
      b.dv.push_back(run.event_y[1]);
      b.v0 = a;
      b.feasible = true;
      break;
    }
    if (z - a < 1e-13) break;
    a = 0.5 * (a + z);
  }
  if (!b.feasible) {
    b.message = fmt::format("no monotone zero crossing before r = {} for v(0) in [{}, {})", opt.r_max, z - eps, z);
    return b;
  }

  // I_{R'}(v) by the trapezoid rule in r with the N alpha_N rho^{N-1} factor.
  const double Fz = g.F(z);
  const double c = N * unit_ball_volume(N);
  double energy = 0.0;
  for (std::size_t k = 1; k < b.r.size(); ++k) {
    auto dens = [&](std::size_t i) {
      return std::pow(b.r[i], N - 1) * (0.5 * b.dv[i] * b.dv[i] + (Fz - g.F(b.v[i])));
    };
    energy += 0.5 * (b.r[k] - b.r[k - 1]) * (dens(k - 1) + dens(k));
  }
  b.energy = c * energy;
  return b;
}

double unit_ball_volume(int N) {
  return std::pow(std::numbers::pi, 0.5 * N) / std::tgamma(0.5 * N + 1.0);
}

double ramp_energy(const Nonlinearity& g, double z, double r, int N) {
  if (!(r > 0.0)) throw InputError("ramp radius must be positive");
  const double Fz = g.F(z);
  const double inner = std::max(r - 1.0, 0.0);
  auto dens = [&](double rho) {
    const double w = z * std::min(1.0, r - rho);
    return std::pow(rho, N - 1) * (0.5 * z * z + (Fz - g.F(w)));
  };
  return N * unit_ball_volume(N) * integrate(dens, inner, r, {}, 1e-10).value;
}

BubbleEnergy bubble_energy(const RadialBubble& b, const Nonlinearity& g, double z,
                           const std::vector<double>& growth_radii) {
  if (!b.feasible) throw InputError("bubble_energy needs a feasible bubble");
  BubbleEnergy e;
  e.I_v = b.energy;
  e.I_w = ramp_energy(g, z, b.R_prime, b.N);
  const double G = g.integral(z - b.eps, z);
  std::vector<double> rs, iw, lb;
  for (double r : growth_radii) {
    GrowthPoint p;
    p.r = r;
    p.ramp_energy = ramp_energy(g, z, r, b.N);
    p.lower_bound = unit_ball_volume(b.N) * std::pow(r, b.N) * G;
    e.growth.push_back(p);
    rs.push_back(r);
    iw.push_back(p.ramp_energy);
    lb.push_back(p.lower_bound);
  }
  if (rs.size() >= 2) {
    e.ramp_exponent = fit_exponent(rs, iw);
    e.bound_exponent = G > 0.0 ? fit_exponent(rs, lb) : 0.0;
  }
  return e;
}

SlidingReport sliding_verify(const Field& u, const RadialBubble& b, Point2 from, Point2 to, int steps) {
  if (!b.feasible) throw InputError("sliding needs a feasible bubble");
  const Grid2D& g = u.grid();
  const double R = b.R_prime;
  const bool periodic2 = u.boundary().x2 == AxisKind::periodic;
  for (const Point2& p : {from, to}) {
    const bool inside1 = p.x1 - R >= 0.0 && p.x1 + R <= g.L1;
    const bool inside2 = periodic2 || (p.x2 - R >= 0.0 && p.x2 + R <= g.L2);
    if (!inside1 || !inside2)
      throw InputError(fmt::format("ball of radius {} at ({}, {}) leaves the domain", R, p.x1, p.x2));
  }
  const double length = std::hypot(to.x1 - from.x1, to.x2 - from.x2);
  if (steps <= 0) steps = std::max(1, static_cast<int>(std::ceil(64.0 * length)));

  // Cartesian samples of the bubble on the field spacing, centred at the origin.
  const double h = g.h;
  const int m = static_cast<int>(std::ceil(R / h)) + 1;
  const int w = 2 * m + 1;
  std::vector<double> local(static_cast<std::size_t>(w) * w);
  for (int p = 0; p < w; ++p)
    for (int q = 0; q < w; ++q) local[static_cast<std::size_t>(p) * w + q] = b.value_at(std::hypot((p - m) * h, (q - m) * h));
  auto bubble = [&](double d1, double d2) {
    const double s = d1 / h + m;
    const double t = d2 / h + m;
    const int p = static_cast<int>(std::floor(s));
    const int q = static_cast<int>(std::floor(t));
    if (p < 0 || q < 0 || p + 1 >= w || q + 1 >= w) return 0.0;
    const double fs = s - p;
    const double ft = t - q;
    auto at = [&](int a, int c) { return local[static_cast<std::size_t>(a) * w + c]; };
    return (1 - fs) * (1 - ft) * at(p, q) + fs * (1 - ft) * at(p + 1, q) + (1 - fs) * ft * at(p, q + 1) +
           fs * ft * at(p + 1, q + 1);
  };

  SlidingReport rep;
  rep.steps = steps;
  rep.min_margin = std::numeric_limits<double>::infinity();
  for (int k = 0; k <= steps; ++k) {
    const double t = static_cast<double>(k) / steps;
    const double y1 = from.x1 + t * (to.x1 - from.x1);
    const double y2 = from.x2 + t * (to.x2 - from.x2);
    double margin = std::numeric_limits<double>::infinity();
    const int i_lo = std::max(0, static_cast<int>(std::floor((y1 - R) / h)));
    const int i_hi = std::min(u.nx() - 1, static_cast<int>(std::ceil((y1 + R) / h)));
    const int j_lo = static_cast<int>(std::floor((y2 - R) / h));
    const int j_hi = static_cast<int>(std::ceil((y2 + R) / h));
    for (int i = i_lo; i <= i_hi; ++i)
      for (int j = j_lo; j <= j_hi; ++j) {
        const double d1 = i * h - y1;
        const double d2 = j * h - y2;
        if (std::hypot(d1, d2) >= R) continue;
        int jj = j;
        if (periodic2)
          jj = ((j % u.ny()) + u.ny()) % u.ny();
        else if (j < 0 || j >= u.ny())
          continue;
        margin = std::min(margin, u(i, jj) - bubble(d1, d2));
      }
    rep.t.push_back(t);
    rep.margins.push_back(margin);
    if (margin < rep.min_margin) {
      rep.min_margin = margin;
      rep.worst_t = t;
    }
    if (!(margin > 0.0) && !rep.failed) {
      rep.failed = true;
      rep.failure_t = t;
      if (k == 0) break;
    }
  }
  rep.lower_bound = b.v0 - std::max(0.0, -rep.min_margin);
  return rep;
}

}  // namespace ellab
