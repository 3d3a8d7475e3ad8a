#include "ellab/field.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>

#include <fmt/format.h>

#include "ellab/error.hpp"

namespace ellab {

Grid2D Grid2D::make(double L1, double L2, double h) {
  if (!(h > 0.0) || !std::isfinite(h)) throw InputError(fmt::format("grid spacing must be positive, got {}", h));
  if (!(L1 > 0.0) || !(L2 > 0.0)) throw InputError("grid extents must be positive");
  Grid2D g{L1, L2, h, static_cast<int>(std::lround(L1 / h)), static_cast<int>(std::lround(L2 / h))};
  if (std::abs(g.n1 * h - L1) > 1e-12 * std::max(1.0, L1) || std::abs(g.n2 * h - L2) > 1e-12 * std::max(1.0, L2))
    throw InputError(fmt::format("extents {} x {} are not multiples of h = {}", L1, L2, h));
  if (g.n1 < 2 || g.n2 < 2) throw InputError("grid needs at least two cells per direction");
  return g;
}

BoundarySpec BoundarySpec::quarter(std::vector<double> u0) {
  BoundarySpec b;
  b.left = std::move(u0);
  return b;
}

BoundarySpec BoundarySpec::half(std::vector<double> u0) {
  BoundarySpec b;
  b.x2 = AxisKind::periodic;
  b.left = std::move(u0);
  return b;
}

BoundarySpec BoundarySpec::periodic_box() {
  BoundarySpec b;
  b.x1 = AxisKind::periodic;
  b.x2 = AxisKind::periodic;
  return b;
}

BoundarySpec BoundarySpec::strip() {
  BoundarySpec b;
  b.x1 = AxisKind::periodic;
  return b;
}

namespace {

void check_trace(const std::vector<double>& t, int expected, const char* what) {
  if (static_cast<int>(t.size()) != expected)
    throw InputError(fmt::format("{} trace has {} samples, grid needs {}", what, t.size(), expected));
  for (double v : t)
    // Small negative round-off (e.g. traces copied out of a solved field) is tolerated.
    if (!std::isfinite(v) || v < -1e-8) throw InputError(fmt::format("{} trace must be finite and nonnegative", what));
}

}  // namespace

Field::Field(Grid2D grid, BoundarySpec boundary, double fill)
    : grid_(grid), boundary_(std::move(boundary)) {
  nx_ = boundary_.x1 == AxisKind::periodic ? grid_.n1 : grid_.n1 + 1;
  ny_ = boundary_.x2 == AxisKind::periodic ? grid_.n2 : grid_.n2 + 1;
  if (boundary_.x1 == AxisKind::walled) {
    check_trace(boundary_.left, ny_, "left");
    if (boundary_.right == FarKind::dirichlet) check_trace(boundary_.right_trace, ny_, "right");
  }
  if (boundary_.x2 == AxisKind::walled && boundary_.top == FarKind::dirichlet)
    check_trace(boundary_.top_trace, nx_, "top");
  values_.assign(static_cast<std::size_t>(nx_) * ny_, fill);
  apply_boundary();
}

bool Field::is_fixed(int i, int j) const {
  if (boundary_.x2 == AxisKind::walled) {
    if (j == 0) return true;
    if (boundary_.top == FarKind::dirichlet && j == ny_ - 1) return true;
  }
  if (boundary_.x1 == AxisKind::walled) {
    if (i == 0) return true;
    if (boundary_.right == FarKind::dirichlet && i == nx_ - 1) return true;
  }
  return false;
}

double Field::fixed_value(int i, int j) const {
  // Corner convention: the bottom wall wins over the u0 trace.
  if (boundary_.x2 == AxisKind::walled && j == 0) return 0.0;
  if (boundary_.x1 == AxisKind::walled && i == 0) return boundary_.left[j];
  if (boundary_.x1 == AxisKind::walled && boundary_.right == FarKind::dirichlet && i == nx_ - 1)
    return boundary_.right_trace[j];
  return boundary_.top_trace[i];
}

void Field::apply_boundary() {
  for (int i = 0; i < nx_; ++i)
    for (int j = 0; j < ny_; ++j)
      if (is_fixed(i, j)) (*this)(i, j) = fixed_value(i, j);
}

void write_field_csv(std::ostream& out, const Field& u) {
  out << "x1,x2,u\n";
  for (int i = 0; i < u.nx(); ++i)
    for (int j = 0; j < u.ny(); ++j) out << fmt::format("{:.17g},{:.17g},{:.17g}\n", u.x1(i), u.x2(j), u(i, j));
}

const char* to_string(AxisKind k) { return k == AxisKind::walled ? "walled" : "periodic"; }
const char* to_string(FarKind k) { return k == FarKind::neumann ? "neumann" : "dirichlet"; }

}  // namespace ellab
