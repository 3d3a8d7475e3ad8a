#include "ellab/trajectory.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <fmt/format.h>

#include "ellab/error.hpp"
#include "ellab/parallel.hpp"

namespace ellab {

namespace {

int shift_index(const Field& u, double h) {
  const double hg = u.grid().h;
  const double k = h / hg;
  const long idx = std::lround(k);
  if (std::abs(k - static_cast<double>(idx)) > 1e-9 * std::max(1.0, k))
    throw InputError(fmt::format("shift {} is not a multiple of the grid spacing {}", h, hg));
  return static_cast<int>(idx);
}

struct IndexBox {
  int i0, i1, j0, j1;
};

IndexBox to_indices(const Field& u, const Window& w) {
  const double h = u.grid().h;
  IndexBox b{static_cast<int>(std::ceil(w.x1_lo / h - 1e-9)), static_cast<int>(std::floor(w.x1_hi / h + 1e-9)),
             static_cast<int>(std::ceil(w.x2_lo / h - 1e-9)), static_cast<int>(std::floor(w.x2_hi / h + 1e-9))};
  b.i0 = std::max(b.i0, 0);
  b.j0 = std::max(b.j0, 0);
  b.i1 = std::min(b.i1, u.nx() - 1);
  b.j1 = std::min(b.j1, u.ny() - 1);
  if (b.i0 > b.i1 || b.j0 > b.j1) throw InputError("window contains no grid nodes");
  return b;
}

}  // namespace

Field shift(const Field& u, double h) {
  if (!(h >= 0.0)) throw InputError("shift must be nonnegative");
  if (u.boundary().x1 != AxisKind::walled) throw InputError("shift needs a walled x1 direction");
  const Grid2D& g = u.grid();
  const int k = shift_index(u, h);
  if (k >= g.n1) throw InputError(fmt::format("shift {} empties the domain [0, {}]", h, g.L1));
  if (k == 0) return u;

  Grid2D ng{g.L1 - k * g.h, g.L2, g.h, g.n1 - k, g.n2};
  BoundarySpec bc = u.boundary();
  bc.left.assign(u.values().begin() + static_cast<std::ptrdiff_t>(k) * u.ny(),
                 u.values().begin() + static_cast<std::ptrdiff_t>(k + 1) * u.ny());
  if (!bc.top_trace.empty()) bc.top_trace.erase(bc.top_trace.begin(), bc.top_trace.begin() + k);
  Field out(ng, std::move(bc));
  std::copy(u.values().begin() + static_cast<std::ptrdiff_t>(k) * u.ny(), u.values().end(), out.values().begin());
  return out;
}

MEstimate estimate_M(const Field& u, const std::vector<double>& window_fracs) {
  if (window_fracs.empty()) throw InputError("estimate_M needs at least one window");
  for (std::size_t k = 0; k < window_fracs.size(); ++k) {
    const double f = window_fracs[k];
    if (!(f > 0.0 && f < 1.0) || (k > 0 && !(f > window_fracs[k - 1])))
      throw InputError("window fractions must be increasing inside (0, 1)");
  }
  MEstimate est;
  est.fracs = window_fracs;
  for (double f : window_fracs) {
    const Window w{f * u.grid().L1, u.grid().L1, 0.0, u.x2(u.ny() - 1)};
    const WindowExtrema e = window_extrema(u, w);
    est.window_M.push_back(e.max);
    est.window_m.push_back(e.min);
  }
  for (std::size_t k = 1; k < window_fracs.size(); ++k)
    est.cauchy = std::max({est.cauchy, std::abs(est.window_M[k] - est.window_M[k - 1]),
                           std::abs(est.window_m[k] - est.window_m[k - 1])});
  est.M = est.window_M.back();
  est.m = est.window_m.back();
  return est;
}

std::vector<double> shift_grid(const Grid2D& grid, int count, double frac) {
  if (count < 2) throw InputError("shift grid needs at least two points");
  const double top = frac * grid.L1;
  const double bottom = std::max(grid.h, top / 64.0);
  std::vector<double> out;
  for (int k = 0; k < count; ++k) {
    const double h = bottom * std::pow(top / bottom, static_cast<double>(k) / (count - 1));
    const long idx = std::max(1L, std::lround(h / grid.h));
    const double snapped = idx * grid.h;
    if (out.empty() || snapped > out.back()) out.push_back(snapped);
  }
  return out;
}

TrajectoryReport omega_limit(const Field& u, const std::vector<Candidate>& candidates, const OmegaOptions& opt) {
  if (candidates.empty()) throw InputError("omega_limit needs at least one candidate");
  TrajectoryReport rep;
  rep.h = shift_grid(u.grid(), opt.h_count, opt.h_frac);
  const bool quarter = u.boundary().x2 == AxisKind::walled;
  const int j_hi = quarter ? static_cast<int>(std::floor(opt.window_frac * u.grid().L2 / u.grid().h + 1e-9))
                           : u.ny() - 1;

  rep.z.resize(candidates.size());
  rep.distances.assign(candidates.size(), std::vector<double>(rep.h.size()));
  // Candidate samples on the x2 nodes, then distances per (candidate, h).
  parallel_for(candidates.size(), opt.threads, [&](std::size_t c) {
    rep.z[c] = candidates[c].z;
    std::vector<double> column(j_hi + 1);
    for (int j = 0; j <= j_hi; ++j) column[j] = candidates[c](u.x2(j));
    for (std::size_t k = 0; k < rep.h.size(); ++k) {
      const int i = static_cast<int>(std::lround(rep.h[k] / u.grid().h));
      double d = 0.0;
      for (int j = 0; j <= j_hi; ++j) d = std::max(d, std::abs(u(i, j) - column[j]));
      rep.distances[c][k] = d;
    }
  });

  std::vector<std::size_t> order(candidates.size());
  for (std::size_t c = 0; c < order.size(); ++c) order[c] = c;
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return rep.distances[a].back() < rep.distances[b].back(); });
  const std::size_t best = order.front();
  rep.final_distance = rep.distances[best].back();
  bool unique = true;
  if (order.size() > 1) {
    const double second = rep.distances[order[1]].back();
    rep.margin_ratio = rep.final_distance > 0.0 ? second / rep.final_distance : std::numeric_limits<double>::infinity();
    unique = rep.margin_ratio >= opt.margin_factor;
    if (!unique) rep.ambiguous = {rep.z[best], rep.z[order[1]]};
  } else {
    rep.margin_ratio = std::numeric_limits<double>::infinity();
  }
  rep.converged = unique && rep.final_distance < opt.conv_tol;
  if (rep.converged) rep.detected_z = rep.z[best];

  // Log-distance slope against h over the second half of the grid.
  const std::size_t n = rep.h.size();
  double sx = 0, sy = 0, sxx = 0, sxy = 0, cnt = 0;
  for (std::size_t k = n / 2; k < n; ++k) {
    const double x = rep.h[k];
    const double y = std::log(std::max(rep.distances[best][k], 1e-300));
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
    cnt += 1;
  }
  const double den = cnt * sxx - sx * sx;
  rep.tail_slope = den > 0.0 ? (cnt * sxy - sx * sy) / den : 0.0;

  const MEstimate M = estimate_M(u, opt.M_windows);
  rep.M_estimate = M.M;
  rep.m_estimate = M.m;
  rep.M_cauchy = M.cauchy;
  return rep;
}

AttractorEstimate attractor_table(const Nonlinearity& nl, double M_cap, ProblemKind kind,
                                  const AttractorOptions& opt) {
  if (!(M_cap >= 0.0)) throw InputError("M_cap must be nonnegative");
  const Nonlinearity scan = nl.s_max() >= M_cap ? nl : nl.with_s_max(M_cap);
  const double cap = M_cap * (1.0 + 1e-12) + 1e-12;
  AttractorEstimate out;
  out.kind = kind;
  out.M_cap = M_cap;
  std::vector<double> zs;
  if (kind == ProblemKind::quarter) {
    for (double z : compute_Zf(scan, opt.tol_f).points)
      if (z <= cap) zs.push_back(z);
    const auto profiles = compute_profiles(scan, zs, opt.xi_max, opt.n, opt.threads, opt.profile);
    for (std::size_t k = 0; k < zs.size(); ++k) out.elements.push_back({zs[k], profiles[k]});
  } else {
    for (double z : zero_set(scan, opt.tol_f).representatives())
      if (z <= cap) out.elements.push_back({z, std::nullopt});
  }
  return out;
}

Window whole_domain(const Field& u) { return {0.0, u.x1(u.nx() - 1), 0.0, u.x2(u.ny() - 1)}; }

double window_norm(const Field& u, const Window& w, int order) {
  if (order != 0 && order != 2) throw InputError("window_norm order must be 0 or 2");
  const IndexBox b = to_indices(u, w);
  const double h = u.grid().h;
  const bool p1 = u.boundary().x1 == AxisKind::periodic;
  const bool p2 = u.boundary().x2 == AxisKind::periodic;
  double sup = 0.0, d1 = 0.0, d2 = 0.0;
  for (int i = b.i0; i <= b.i1; ++i)
    for (int j = b.j0; j <= b.j1; ++j) {
      sup = std::max(sup, std::abs(u(i, j)));
      if (order == 0) continue;
      // x1 direction
      if (p1 || (i > 0 && i + 1 < u.nx())) {
        const int im = (i - 1 + u.nx()) % u.nx();
        const int ip = (i + 1) % u.nx();
        d1 = std::max(d1, std::abs(u(ip, j) - u(im, j)) / (2.0 * h));
        d2 = std::max(d2, std::abs(u(ip, j) - 2.0 * u(i, j) + u(im, j)) / (h * h));
      }
      if (p2 || (j > 0 && j + 1 < u.ny())) {
        const int jm = (j - 1 + u.ny()) % u.ny();
        const int jp = (j + 1) % u.ny();
        d1 = std::max(d1, std::abs(u(i, jp) - u(i, jm)) / (2.0 * h));
        d2 = std::max(d2, std::abs(u(i, jp) - 2.0 * u(i, j) + u(i, jm)) / (h * h));
      }
    }
  return sup + d1 + d2;
}

WindowExtrema window_extrema(const Field& u, const Window& w) {
  const IndexBox b = to_indices(u, w);
  WindowExtrema e{std::numeric_limits<double>::infinity(), -std::numeric_limits<double>::infinity()};
  for (int i = b.i0; i <= b.i1; ++i)
    for (int j = b.j0; j <= b.j1; ++j) {
      e.min = std::min(e.min, u(i, j));
      e.max = std::max(e.max, u(i, j));
    }
  return e;
}

const char* to_string(ProblemKind k) { return k == ProblemKind::quarter ? "quarter" : "half"; }

}  // namespace ellab
