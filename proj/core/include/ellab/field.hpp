#pragma once

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace ellab {

// Uniform rectangular grid on [0, L1] x [0, L2].
struct Grid2D {
  double L1 = 0.0;
  double L2 = 0.0;
  double h = 0.0;
  int n1 = 0;
  int n2 = 0;

  // Validates n * h == L within 1e-12 for both directions.
  static Grid2D make(double L1, double L2, double h);
};

enum class AxisKind {
  walled,   // Dirichlet at the low end, far end per FarKind
  periodic  // index wrap with period n*h
};

enum class FarKind { neumann, dirichlet };

// Boundary specification. Direction x1 is the "time" direction: walled
// means a Dirichlet trace u0 at x1 = 0. Direction x2 is the wall-normal
// direction of the quarter-plane: walled means u = 0 at x2 = 0.
struct BoundarySpec {
  AxisKind x1 = AxisKind::walled;
  AxisKind x2 = AxisKind::walled;
  std::vector<double> left;   // u0 at x1 = 0, one entry per x2 node
  FarKind right = FarKind::neumann;
  std::vector<double> right_trace;  // per x2 node when right is dirichlet
  FarKind top = FarKind::neumann;
  std::vector<double> top_trace;  // per x1 node when top is dirichlet

  static BoundarySpec quarter(std::vector<double> u0);
  static BoundarySpec half(std::vector<double> u0);
  static BoundarySpec periodic_box();
  static BoundarySpec strip();
};

struct SolveCertificate {
  double residual = 0.0;  // max |Lap_h u + f(u)| over unknown nodes
  int iterations = 0;
  std::string method;
  double min_value = 0.0;
  bool maximum_principle_violation = false;
  std::vector<double> residual_history;
  double wall_time_ms = 0.0;
};

// Nodal samples of u. Storage is row-major in x1: index = i * ny + j.
class Field {
 public:
  Field(Grid2D grid, BoundarySpec boundary, double fill = 0.0);

  const Grid2D& grid() const { return grid_; }
  const BoundarySpec& boundary() const { return boundary_; }
  int nx() const { return nx_; }
  int ny() const { return ny_; }
  double x1(int i) const { return i * grid_.h; }
  double x2(int j) const { return j * grid_.h; }

  double& operator()(int i, int j) { return values_[static_cast<std::size_t>(i) * ny_ + j]; }
  double operator()(int i, int j) const { return values_[static_cast<std::size_t>(i) * ny_ + j]; }
  std::vector<double>& values() { return values_; }
  const std::vector<double>& values() const { return values_; }

  // Dirichlet node: value fixed by the boundary specification.
  bool is_fixed(int i, int j) const;
  double fixed_value(int i, int j) const;
  // Overwrites every Dirichlet node with its prescribed value.
  void apply_boundary();

  const std::optional<SolveCertificate>& certificate() const { return certificate_; }
  void set_certificate(SolveCertificate c) { certificate_ = std::move(c); }

 private:
  Grid2D grid_;
  BoundarySpec boundary_;
  int nx_ = 0;
  int ny_ = 0;
  std::vector<double> values_;
  std::optional<SolveCertificate> certificate_;
};

void write_field_csv(std::ostream& out, const Field& u);

const char* to_string(AxisKind k);
const char* to_string(FarKind k);

}  // namespace ellab
