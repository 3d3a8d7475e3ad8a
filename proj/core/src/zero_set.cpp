#include <algorithm>
#include <cmath>
#include <limits>

#include <fmt/format.h>

#include "ellab/error.hpp"
#include "ellab/nonlinearity.hpp"

namespace ellab {

namespace {

constexpr double kInvPhi = 0.6180339887498949;

// Minimizes |f| on [a, b] by golden-section search.
double golden_min_abs(const Nonlinearity& nl, double a, double b) {
  double c = b - kInvPhi * (b - a);
  double d = a + kInvPhi * (b - a);
  double fc = std::abs(nl(c));
  double fd = std::abs(nl(d));
  for (int it = 0; it < 200 && b - a > 4 * std::numeric_limits<double>::epsilon() * std::max(1.0, std::abs(a)); ++it) {
    if (fc <= fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - kInvPhi * (b - a);
      fc = std::abs(nl(c));
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + kInvPhi * (b - a);
      fd = std::abs(nl(d));
    }
  }
  const double x = 0.5 * (a + b);
  // Endpoints of the final bracket may be exact zeros (e.g. 0 for |sin|).
  double best = x;
  for (double cand : {a, b})
    if (std::abs(nl(cand)) < std::abs(nl(best))) best = cand;
  return best;
}

double bisect_sign(const Nonlinearity& nl, double a, double b) {
  double fa = nl(a);
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (a + b);
    if (mid == a || mid == b) break;
    const double fm = nl(mid);
    if (fm == 0.0) return mid;
    if ((fm < 0.0) == (fa < 0.0)) {
      a = mid;
      fa = fm;
    } else {
      b = mid;
    }
  }
  return std::abs(nl(a)) <= std::abs(nl(b)) ? a : b;
}

// Boundary between a non-flat point `out` and a flat point `in`; returns the
// flat-side limit.
double bisect_flat(const Nonlinearity& nl, double out, double in, double tol_f) {
  // When f vanishes exactly inside the stretch, locate the exact zero set
  // rather than the tol_f level (which sits tol_f / slope outside it).
  const double level = nl(in) == 0.0 ? 0.0 : tol_f;
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (out + in);
    if (mid == out || mid == in) break;
    (std::abs(nl(mid)) <= level ? in : out) = mid;
  }
  return in;
}

}  // namespace

std::vector<double> ZeroSet::representatives() const {
  std::vector<double> out = points;
  for (const auto& [a, b] : intervals) {
    out.push_back(a);
    out.push_back(b);
  }
  std::sort(out.begin(), out.end());
  return out;
}

double ZeroSet::distance(double s) const {
  double best = std::numeric_limits<double>::infinity();
  for (double p : points) best = std::min(best, std::abs(s - p));
  for (const auto& [a, b] : intervals) {
    if (s >= a && s <= b) return 0.0;
    best = std::min({best, std::abs(s - a), std::abs(s - b)});
  }
  return best;
}

ZeroSet zero_set(const Nonlinearity& nl, double tol_f, int grid_n) {
  if (grid_n < 2) throw InputError(fmt::format("zero_set: grid_n must be >= 2, got {}", grid_n));
  if (!(tol_f >= 0.0)) throw InputError("zero_set: tol_f must be nonnegative");
  const double s_max = nl.s_max();
  const double ds = s_max / (grid_n - 1);
  std::vector<double> s(grid_n), f(grid_n);
  for (int i = 0; i < grid_n; ++i) {
    s[i] = i == grid_n - 1 ? s_max : i * ds;
    f[i] = nl(s[i]);
  }
  auto flat = [&](int i) { return std::abs(f[i]) <= tol_f; };

  ZeroSet out;
  out.tol_f = tol_f;
  std::vector<double> pts;
  int i = 0;
  while (i < grid_n) {
    if (!flat(i)) {
      ++i;
      continue;
    }
    int j = i;
    while (j + 1 < grid_n && flat(j + 1)) ++j;
    if (j > i) {
      const double lo = i > 0 ? bisect_flat(nl, s[i - 1], s[i], tol_f) : s[i];
      const double hi = j + 1 < grid_n ? bisect_flat(nl, s[j + 1], s[j], tol_f) : s[j];
      out.intervals.emplace_back(lo, hi);
    } else {
      const double a = s[std::max(i - 1, 0)];
      const double b = s[std::min(i + 1, grid_n - 1)];
      double p = golden_min_abs(nl, a, b);
      if (std::abs(f[i]) <= std::abs(nl(p))) p = s[i];
      pts.push_back(p);
    }
    i = j + 1;
  }
  for (int k = 0; k + 1 < grid_n; ++k) {
    if (flat(k) || flat(k + 1)) continue;
    if ((f[k] < 0.0) != (f[k + 1] < 0.0)) pts.push_back(bisect_sign(nl, s[k], s[k + 1]));
  }
  for (int k = 1; k + 1 < grid_n; ++k) {
    if (flat(k)) continue;
    const double a = std::abs(f[k]);
    if (a <= std::abs(f[k - 1]) && a <= std::abs(f[k + 1])) {
      const double p = golden_min_abs(nl, s[k - 1], s[k + 1]);
      if (std::abs(nl(p)) <= tol_f) pts.push_back(p);
    }
  }

  std::sort(pts.begin(), pts.end());
  for (double p : pts) {
    const bool in_interval = std::any_of(out.intervals.begin(), out.intervals.end(), [&](const auto& iv) {
      return p >= iv.first - ds && p <= iv.second + ds;
    });
    if (in_interval) continue;
    if (!out.points.empty() && p - out.points.back() < ds) {
      if (std::abs(nl(p)) < std::abs(nl(out.points.back()))) out.points.back() = p;
      continue;
    }
    out.points.push_back(std::clamp(p, 0.0, s_max));
  }
  return out;
}

ZeroSet compute_Zf(const Nonlinearity& nl, double tol_f, double tol_F, int grid_n) {
  const ZeroSet all = zero_set(nl, tol_f, grid_n);
  const double s_max = nl.s_max();
  const double ds = s_max / (grid_n - 1);

  // Running maximum of F over the grid: F(z0) must strictly exceed it at
  // every grid point z <= z0 - ds.
  std::vector<double> prefix_max(grid_n);
  double running = -std::numeric_limits<double>::infinity();
  for (int i = 0; i < grid_n; ++i) {
    running = std::max(running, nl.F(i == grid_n - 1 ? s_max : i * ds));
    prefix_max[i] = running;
  }

  std::vector<double> candidates = all.points;
  for (const auto& iv : all.intervals) candidates.push_back(iv.first);
  std::sort(candidates.begin(), candidates.end());

  ZeroSet out;
  out.tol_f = tol_f;
  for (double z0 : candidates) {
    if (z0 < 0.5 * ds) {
      out.points.push_back(0.0);
      out.origin_by_convention = true;
      continue;
    }
    const int idx = static_cast<int>(std::floor((z0 - ds) / ds + 1e-9));
    if (idx < 0) {
      out.borderline.push_back(z0);
      continue;
    }
    const double margin = nl.F(z0) - prefix_max[std::min(idx, grid_n - 1)];
    if (margin > tol_F)
      out.points.push_back(z0);
    else if (margin >= -tol_F)
      out.borderline.push_back(z0);
  }
  return out;
}

namespace {

constexpr double kDeltas[] = {1e-3, 1e-4, 1e-5, 1e-6, 1e-7};

RatioEstimate ratio_at(const Nonlinearity& nl, double z, int side, double ratio_tol) {
  RatioEstimate r;
  r.z = z;
  r.min_ratio = std::numeric_limits<double>::infinity();
  r.max_ratio = -std::numeric_limits<double>::infinity();
  for (double d : kDeltas) {
    const double q = nl(z + side * d) / (side * d);
    r.min_ratio = std::min(r.min_ratio, q);
    r.max_ratio = std::max(r.max_ratio, q);
  }
  if (r.min_ratio > ratio_tol)
    r.verdict = Verdict::holds;
  else if (r.max_ratio <= ratio_tol)
    r.verdict = Verdict::fails;
  else
    r.verdict = Verdict::indeterminate;
  return r;
}

Verdict combine(Verdict acc, Verdict v) {
  if (acc == Verdict::fails || v == Verdict::fails) return Verdict::fails;
  if (acc == Verdict::indeterminate || v == Verdict::indeterminate) return Verdict::indeterminate;
  return Verdict::holds;
}

}  // namespace

HypothesisReport check_hypotheses(const Nonlinearity& nl, const HypothesisOptions& opt) {
  const int n = opt.grid_n;
  if (n < 3) throw InputError("check_hypotheses: grid_n must be >= 3");
  const double s_max = nl.s_max();
  const double ds = s_max / (n - 1);
  std::vector<double> s(n), f(n);
  for (int i = 0; i < n; ++i) {
    s[i] = i == n - 1 ? s_max : i * ds;
    f[i] = nl(s[i]);
  }
  const ZeroSet E = zero_set(nl, opt.tol_f, n);
  HypothesisReport rep;

  // First positive zero.
  std::optional<double> mu;
  for (double p : E.representatives())
    if (p > 0.5 * ds) {
      mu = p;
      break;
    }
  if (mu) {
    rep.mu = *mu;
    Verdict h1 = Verdict::holds;
    for (int i = 1; i < n && s[i] < *mu - 0.5 * ds; ++i)
      if (!(f[i] > 0.0)) h1 = Verdict::fails;
    for (int i = 0; i < n; ++i)
      if (s[i] >= *mu && f[i] > opt.tol_f) h1 = Verdict::fails;
    int k = static_cast<int>(std::floor(*mu / ds));
    k = std::min(k, n - 1);
    while (k > 0 && f[k - 1] >= f[k] - 1e-15) --k;
    rep.mu_prime = s[k] > 0.0 && s[k] < *mu ? s[k] : 0.5 * *mu;
    if (std::abs(nl(0.0)) <= opt.tol_f) {
      rep.origin_ratio = ratio_at(nl, 0.0, +1, opt.ratio_tol);
      h1 = combine(h1, rep.origin_ratio->verdict);
    } else if (nl(0.0) < 0.0) {
      h1 = Verdict::fails;
    }
    rep.h1 = h1;
  }

  Verdict h2 = E.empty() ? Verdict::fails : Verdict::holds;
  for (double v : f)
    if (v < -opt.tol_f) h2 = Verdict::fails;
  for (double z : E.points) {
    rep.h2_ratios.push_back(ratio_at(nl, z, +1, opt.ratio_tol));
    h2 = combine(h2, rep.h2_ratios.back().verdict);
  }
  for (const auto& [a, b] : E.intervals) {
    // Interior points of a flat stretch have vanishing right quotients.
    RatioEstimate r = ratio_at(nl, 0.5 * (a + b), +1, opt.ratio_tol);
    rep.h2_ratios.push_back(r);
    h2 = combine(h2, r.verdict);
  }
  rep.h2 = h2;

  if (rep.h1 == Verdict::holds) {
    Verdict h3 = Verdict::holds;
    for (double z : E.points) {
      if (z <= rep.mu + ds) continue;
      rep.h3_ratios.push_back(ratio_at(nl, z, -1, opt.ratio_tol));
      h3 = combine(h3, rep.h3_ratios.back().verdict);
    }
    for (const auto& [a, b] : E.intervals) {
      if (b <= rep.mu + ds) continue;
      RatioEstimate r = ratio_at(nl, std::max(0.5 * (a + b), rep.mu + 2 * ds), -1, opt.ratio_tol);
      rep.h3_ratios.push_back(r);
      h3 = combine(h3, r.verdict);
    }
    rep.h3 = h3;
  }
  return rep;
}

}  // namespace ellab
