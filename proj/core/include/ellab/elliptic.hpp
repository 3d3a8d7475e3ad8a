#pragma once

#include <functional>
#include <vector>

#include "ellab/field.hpp"
#include "ellab/nonlinearity.hpp"

namespace ellab {

enum class SolveMethod {
  monotone,   // sub/supersolution Picard iteration only
  newton,     // damped Newton from the subsolution (or a given start)
  automatic   // monotone down to handoff_residual, then Newton polish
};

struct SolveOptions {
  SolveMethod method = SolveMethod::automatic;
  double tol = 1e-8;
  int max_monotone_iterations = 20000;
  int max_newton_iterations = 50;
  double damping_floor = 1.0 / 1024.0;
  double handoff_residual = 1e-3;
  // Unknown count above which the direct factorization is replaced by
  // ILUT-preconditioned BiCGSTAB.
  int direct_limit = 256 * 256;
  int threads = 1;
  // Called after every accepted iterate (monotone and Newton alike).
  std::function<void(int iteration, const Field& u)> on_iterate;
};

// Lap_h u + f(u) at every node; zero at Dirichlet nodes.
std::vector<double> residual_field(const Field& u, const Nonlinearity& nl, int threads = 1);
// max |Lap_h u + f(u)| over the unknown nodes.
double residual_norm(const Field& u, const Nonlinearity& nl, int threads = 1);

// Constant subsolution below the Dirichlet data, or 0 inside when no zero of
// f lies below the data. Boundary nodes carry the data.
Field automatic_subsolution(const Nonlinearity& nl, const BoundarySpec& bc, const Grid2D& grid);
// Constant supersolution S >= data with f(S) <= 0.
Field automatic_supersolution(const Nonlinearity& nl, const BoundarySpec& bc, const Grid2D& grid);

// Picard iteration (Lap_h - K) u_{k+1} = -f(u_k) - K u_k with K = 1.1 * Lipschitz.
// Throws ConsistencyError if an iterate leaves [u_k, sup].
Field monotone_iterate(const Field& sub, const Field& sup, const Nonlinearity& nl,
                       const SolveOptions& opt = {});

Field newton_solve(const Field& init, const Nonlinearity& nl, const SolveOptions& opt = {});

// Generic driver for any boundary specification with at least one Dirichlet
// node (monotone) or any specification (Newton with explicit start).
Field solve_field(const Nonlinearity& nl, const BoundarySpec& bc, const Grid2D& grid,
                  const SolveOptions& opt = {});

// Walled in both directions: u0 at x1 = 0, u = 0 at x2 = 0.
Field solve_quarter(const Nonlinearity& nl, const BoundarySpec& bc, const Grid2D& grid,
                    const SolveOptions& opt = {});
// Walled in x1, periodic in x2.
Field solve_half(const Nonlinearity& nl, const BoundarySpec& bc, const Grid2D& grid,
                 const SolveOptions& opt = {});

const char* to_string(SolveMethod m);

}  // namespace ellab
