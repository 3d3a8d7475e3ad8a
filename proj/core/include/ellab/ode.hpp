#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <functional>
#include <optional>
#include <span>
#include <vector>

namespace ellab::ode {

template <std::size_t D>
using State = std::array<double, D>;

template <std::size_t D>
using Rhs = std::function<State<D>(double, const State<D>&)>;

// Root function for event detection; an event fires when the sign of g
// changes across an accepted step in the requested direction
// (+1 rising, -1 falling, 0 either).
template <std::size_t D>
struct Event {
  std::function<double(double, const State<D>&)> g;
  int direction = 0;
};

struct Options {
  double tol = 1e-10;
  double initial_step = 1e-3;
  double min_step = 1e-14;
  double max_step = 0.25;
  std::size_t max_steps = 2'000'000;
};

template <std::size_t D>
struct Sample {
  double t;
  State<D> y;
};

template <std::size_t D>
struct Result {
  std::vector<Sample<D>> outputs;  // at the requested output times reached
  std::optional<std::size_t> event_index;
  double event_t = 0.0;
  State<D> event_y{};
  double t_final = 0.0;
  State<D> y_final{};
  bool step_underflow = false;
  bool non_finite = false;
  std::size_t steps = 0;
};

namespace detail {

template <std::size_t D>
State<D> axpy(const State<D>& y, double a, const State<D>& k) {
  State<D> r;
  for (std::size_t i = 0; i < D; ++i) r[i] = y[i] + a * k[i];
  return r;
}

template <std::size_t D>
State<D> rk4_step(const Rhs<D>& f, double t, const State<D>& y, double dt) {
  const State<D> k1 = f(t, y);
  const State<D> k2 = f(t + 0.5 * dt, axpy(y, 0.5 * dt, k1));
  const State<D> k3 = f(t + 0.5 * dt, axpy(y, 0.5 * dt, k2));
  const State<D> k4 = f(t + dt, axpy(y, dt, k3));
  State<D> r;
  for (std::size_t i = 0; i < D; ++i)
    r[i] = y[i] + dt / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
  return r;
}

template <std::size_t D>
bool finite(const State<D>& y) {
  return std::all_of(y.begin(), y.end(), [](double v) { return std::isfinite(v); });
}

}  // namespace detail

// Classical RK4 with step-doubling error control. Steps are clipped so that
// every entry of `output_times` (ascending, within [t0, t_end]) is hit
// exactly. Integration stops at t_end, at the first event, on step-size
// underflow, or when the state leaves the finite range.
template <std::size_t D>
Result<D> integrate(const Rhs<D>& f, double t0, State<D> y0, double t_end,
                    std::span<const double> output_times = {},
                    std::span<const Event<D>> events = {}, const Options& opt = {}) {
  Result<D> res;
  double t = t0;
  State<D> y = y0;
  double dt = std::min(opt.initial_step, opt.max_step);
  std::size_t next_out = 0;
  while (next_out < output_times.size() && output_times[next_out] < t0) ++next_out;
  if (next_out < output_times.size() && output_times[next_out] == t0) {
    res.outputs.push_back({t0, y0});
    ++next_out;
  }

  std::vector<double> g_prev(events.size());
  for (std::size_t e = 0; e < events.size(); ++e) g_prev[e] = events[e].g(t, y);

  while (t < t_end && res.steps < opt.max_steps) {
    double target = t_end;
    if (next_out < output_times.size()) target = std::min(target, output_times[next_out]);
    double h = std::min(dt, target - t);
    const bool clipped = h < dt;

    const State<D> full = detail::rk4_step(f, t, y, h);
    const State<D> half = detail::rk4_step(f, t, y, 0.5 * h);
    const State<D> two = detail::rk4_step(f, t + 0.5 * h, half, 0.5 * h);
    double err = 0.0;
    for (std::size_t i = 0; i < D; ++i) {
      const double scale = opt.tol * (1.0 + std::abs(two[i]));
      err = std::max(err, std::abs(two[i] - full[i]) / 15.0 / scale);
    }
    if (!detail::finite(two)) err = 1e300;

    if (err > 1.0) {
      dt = h * std::max(0.1, 0.9 * std::pow(err, -0.2));
      if (dt < opt.min_step) {
        res.step_underflow = true;
        break;
      }
      continue;
    }

    const double t_new = (h == target - t) ? target : t + h;
    const State<D>& y_new = two;
    ++res.steps;

    // Event location: bisection on the sub-step length, re-stepping from (t, y).
    std::optional<std::size_t> fired;
    double t_fire = t_new;
    for (std::size_t e = 0; e < events.size(); ++e) {
      const double g_new = events[e].g(t_new, y_new);
      const double g_old = g_prev[e];
      const bool rising = g_old < 0.0 && g_new >= 0.0;
      const bool falling = g_old > 0.0 && g_new <= 0.0;
      const bool hit = (events[e].direction >= 0 && rising) || (events[e].direction <= 0 && falling);
      if (!hit) continue;
      double lo = 0.0, hi = h;
      for (int it = 0; it < 80 && hi - lo > 1e-15 * std::max(1.0, std::abs(t)); ++it) {
        const double mid = 0.5 * (lo + hi);
        const double gm = events[e].g(t + mid, detail::rk4_step(f, t, y, mid));
        const bool crossed = rising ? gm >= 0.0 : gm <= 0.0;
        (crossed ? hi : lo) = mid;
      }
      if (!fired || t + hi < t_fire) {
        fired = e;
        t_fire = t + hi;
      }
    }
    if (fired) {
      res.event_index = fired;
      res.event_t = t_fire;
      res.event_y = detail::rk4_step(f, t, y, t_fire - t);
      t = t_fire;
      y = res.event_y;
      while (next_out < output_times.size() && output_times[next_out] < t) ++next_out;
      break;
    }

    t = t_new;
    y = y_new;
    for (std::size_t e = 0; e < events.size(); ++e) g_prev[e] = events[e].g(t, y);
    if (next_out < output_times.size() && t == output_times[next_out]) {
      res.outputs.push_back({t, y});
      ++next_out;
    }
    if (!detail::finite(y)) {
      res.non_finite = true;
      break;
    }
    const double grow = err > 0.0 ? 0.9 * std::pow(err, -0.2) : 4.0;
    const double proposal = h * std::min(4.0, std::max(0.1, grow));
    dt = std::min(opt.max_step, clipped ? std::max(dt, proposal) : proposal);
  }
  res.t_final = t;
  res.y_final = y;
  return res;
}

}  // namespace ellab::ode
