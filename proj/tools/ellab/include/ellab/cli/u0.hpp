#pragma once

#include <optional>
#include <string>
#include <vector>

#include "ellab/field.hpp"
#include "ellab/nonlinearity.hpp"

namespace ellab::cli {

enum class U0Kind { constant, bump, profile, table };

// Parsed form of `constant:<c>`, `bump:<center>,<width>,<height>`,
// `profile:<z>` or `table:<path>`.
struct U0Spec {
  U0Kind kind = U0Kind::constant;
  std::vector<double> params;
  std::string path;
};

U0Spec parse_u0(const std::string& spec);

// Samples the trace at the given x2 positions. Table files are read here.
std::vector<double> sample_u0(const U0Spec& spec, const Nonlinearity& nl, const std::vector<double>& x2);

// Far boundary: `neumann` (nullopt) or `dirichlet:<c>`.
std::optional<double> parse_far(const std::string& spec);

// Boundary specification for a quarter or half problem described by the
// given traces on `grid`.
BoundarySpec make_boundary(const std::string& kind, const Grid2D& grid, const U0Spec& u0, const Nonlinearity& nl,
                           const std::string& right, const std::string& top);

}  // namespace ellab::cli
