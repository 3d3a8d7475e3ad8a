#include "ellab/elliptic.hpp"

#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <limits>
#include <memory>

#include <Eigen/IterativeLinearSolvers>
#include <Eigen/SparseCore>
#include <Eigen/SparseLU>
#include <fmt/format.h>

#include "ellab/error.hpp"
#include "ellab/parallel.hpp"
#include "ellab/stencil.hpp"

namespace ellab {

namespace {

using SpMat = Eigen::SparseMatrix<double>;
using Vec = Eigen::VectorXd;

void residual_into(const Stencil& st, const std::vector<double>& v, const Nonlinearity& nl, int threads,
                   std::vector<double>& r) {
  r.resize(st.size());
  parallel_chunks(st.size(), threads, [&](std::size_t b, std::size_t e) {
    for (std::size_t k = b; k < e; ++k) r[k] = st.laplacian(v, k) + nl(v[st.node_of[k]]);
  });
}

double max_abs(const std::vector<double>& r) {
  double m = 0.0;
  for (double x : r) {
    if (!std::isfinite(x)) return std::numeric_limits<double>::infinity();
    m = std::max(m, std::abs(x));
  }
  return m;
}

// Sparse LU for moderate sizes, ILUT-preconditioned BiCGSTAB beyond.
class LinearSolver {
 public:
  explicit LinearSolver(int direct_limit) : direct_limit_(direct_limit) {}

  void factor(const SpMat& A) {
    if (A.rows() <= direct_limit_) {
      if (!lu_) {
        lu_ = std::make_unique<Eigen::SparseLU<SpMat, Eigen::COLAMDOrdering<int>>>();
        lu_->analyzePattern(A);
      }
      lu_->factorize(A);
      if (lu_->info() != Eigen::Success) throw NumericError("sparse LU factorization failed", 0.0);
    } else {
      it_ = std::make_unique<Eigen::BiCGSTAB<SpMat, Eigen::IncompleteLUT<double>>>();
      it_->preconditioner().setDroptol(1e-6);
      it_->preconditioner().setFillfactor(20);
      it_->setTolerance(1e-14);
      it_->setMaxIterations(4000);
      it_->compute(A);
      if (it_->info() != Eigen::Success) throw NumericError("ILUT preconditioner setup failed", 0.0);
    }
  }

  Vec solve(const Vec& b, const Vec& guess) {
    if (lu_) {
      Vec x = lu_->solve(b);
      if (lu_->info() != Eigen::Success) throw NumericError("sparse LU solve failed", 0.0);
      return x;
    }
    Vec x = it_->solveWithGuess(b, guess);
    if (it_->info() != Eigen::Success && it_->error() > 1e-10)
      throw NumericError(fmt::format("BiCGSTAB stalled at relative error {:.3e}", it_->error()), it_->error());
    return x;
  }

 private:
  int direct_limit_;
  std::unique_ptr<Eigen::SparseLU<SpMat, Eigen::COLAMDOrdering<int>>> lu_;
  std::unique_ptr<Eigen::BiCGSTAB<SpMat, Eigen::IncompleteLUT<double>>> it_;
};

double elapsed_ms(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
}

void finish(Field& u, SolveCertificate cert, const Nonlinearity& nl, const SolveOptions& opt,
            std::chrono::steady_clock::time_point t0) {
  u.apply_boundary();
  cert.residual = residual_norm(u, nl, opt.threads);
  cert.min_value = *std::min_element(u.values().begin(), u.values().end());
  cert.maximum_principle_violation = cert.min_value < -opt.tol;
  cert.wall_time_ms = elapsed_ms(t0);
  u.set_certificate(std::move(cert));
}

bool has_dirichlet(const Field& u) {
  for (int i = 0; i < u.nx(); ++i)
    for (int j = 0; j < u.ny(); ++j)
      if (u.is_fixed(i, j)) return true;
  return false;
}

std::pair<double, double> data_range(const Field& u) {
  double lo = std::numeric_limits<double>::infinity();
  double hi = -lo;
  for (int i = 0; i < u.nx(); ++i)
    for (int j = 0; j < u.ny(); ++j)
      if (u.is_fixed(i, j)) {
        lo = std::min(lo, u.fixed_value(i, j));
        hi = std::max(hi, u.fixed_value(i, j));
      }
  return {lo, hi};
}

void require_compatible(const Field& a, const Field& b) {
  if (a.nx() != b.nx() || a.ny() != b.ny() || a.grid().h != b.grid().h)
    throw InputError("sub and sup fields live on different grids");
}

Field monotone_core(const Field& sub, const Field& sup, const Nonlinearity& nl, const SolveOptions& opt,
                    double target, SolveCertificate& cert) {
  require_compatible(sub, sup);
  const Stencil st(sub);
  const double slack_abs = 1e-11;
  for (std::size_t n = 0; n < sub.values().size(); ++n)
    if (sub.values()[n] > sup.values()[n] + slack_abs) throw InputError("monotone_iterate: sub must lie below sup");

  std::vector<double> r;
  residual_into(st, sub.values(), nl, opt.threads, r);
  for (double x : r)
    if (x < -opt.tol) throw InputError("monotone_iterate: sub is not a discrete subsolution");
  residual_into(st, sup.values(), nl, opt.threads, r);
  for (double x : r)
    if (x > opt.tol) throw InputError("monotone_iterate: sup is not a discrete supersolution");

  Field u = sub;
  u.apply_boundary();
  residual_into(st, u.values(), nl, opt.threads, r);
  double res = max_abs(r);
  cert.residual_history.push_back(res);
  if (res <= target || st.size() == 0) return u;

  const double K = nl.lipschitz_estimate() > 0.0 ? 1.1 * nl.lipschitz_estimate() : 1.0;
  const std::vector<double> shift(st.size(), -K);
  LinearSolver solver(opt.direct_limit);
  solver.factor(st.matrix(shift));
  const Vec bc_rhs = st.boundary_rhs(u.values());

  Vec x(static_cast<int>(st.size()));
  Vec b(static_cast<int>(st.size()));
  std::vector<double>& v = u.values();
  for (int it = 1; it <= opt.max_monotone_iterations; ++it) {
    for (std::size_t k = 0; k < st.size(); ++k) {
      const double uk = v[st.node_of[k]];
      x[static_cast<int>(k)] = uk;
      b[static_cast<int>(k)] = -nl(uk) - K * uk - bc_rhs[static_cast<int>(k)];
    }
    const Vec next = solver.solve(b, x);
    double update = 0.0;
    for (std::size_t k = 0; k < st.size(); ++k) {
      const int node = st.node_of[k];
      const double nv = next[static_cast<int>(k)];
      const double slack = slack_abs * (1.0 + std::abs(v[node]));
      if (!std::isfinite(nv)) throw NumericError("monotone iterate became non-finite", res);
      if (nv < v[node] - slack || nv > sup.values()[node] + slack)
        throw ConsistencyError(fmt::format(
            "monotone iterate {} left the order interval at node ({}, {}): {} vs [{}, {}]", it,
            node / st.ny, node % st.ny, nv, v[node], sup.values()[node]));
      update = std::max(update, std::abs(nv - v[node]));
      v[node] = nv;
    }
    cert.iterations = it;
    residual_into(st, v, nl, opt.threads, r);
    res = max_abs(r);
    cert.residual_history.push_back(res);
    if (opt.on_iterate) opt.on_iterate(it, u);
    if (res <= target) return u;
    if (update == 0.0) break;
  }
  throw NumericError(fmt::format("monotone iteration stopped at residual {:.3e} (target {:.3e})", res, target),
                     res);
}

Field newton_core(const Field& init, const Nonlinearity& nl, const SolveOptions& opt, SolveCertificate& cert,
                  int iteration_offset) {
  Field u = init;
  u.apply_boundary();
  const Stencil st(u);
  std::vector<double>& v = u.values();
  std::vector<double> r;
  residual_into(st, v, nl, opt.threads, r);
  double res = max_abs(r);
  cert.residual_history.push_back(res);
  if (res <= opt.tol || st.size() == 0) return u;
  if (!std::isfinite(res)) throw NumericError("Newton start is not finite", res);

  LinearSolver solver(opt.direct_limit);
  std::vector<double> diag(st.size());
  std::vector<double> trial;
  std::vector<double> r_trial;
  for (int it = 1; it <= opt.max_newton_iterations; ++it) {
    for (std::size_t k = 0; k < st.size(); ++k) diag[k] = nl.derivative(v[st.node_of[k]]);
    solver.factor(st.matrix(diag));
    Vec rhs(static_cast<int>(st.size()));
    for (std::size_t k = 0; k < st.size(); ++k) rhs[static_cast<int>(k)] = -r[k];
    const Vec delta = solver.solve(rhs, Vec::Zero(static_cast<int>(st.size())));

    double alpha = 1.0;
    for (;;) {
      trial = v;
      for (std::size_t k = 0; k < st.size(); ++k) trial[st.node_of[k]] += alpha * delta[static_cast<int>(k)];
      residual_into(st, trial, nl, opt.threads, r_trial);
      const double rt = max_abs(r_trial);
      if (rt <= (1.0 - 1e-4 * alpha) * res) {
        res = rt;
        break;
      }
      alpha *= 0.5;
      if (alpha < opt.damping_floor)
        throw NumericError(fmt::format("Newton damping floor reached at residual {:.3e}", res), res);
    }
    v.swap(trial);
    r.swap(r_trial);
    cert.iterations = iteration_offset + it;
    cert.residual_history.push_back(res);
    if (opt.on_iterate) opt.on_iterate(cert.iterations, u);
    if (res <= opt.tol) return u;
  }
  throw NumericError(fmt::format("Newton did not reach {:.3e}; last residual {:.3e}", opt.tol, res), res);
}

}  // namespace

std::vector<double> residual_field(const Field& u, const Nonlinearity& nl, int threads) {
  const Stencil st(u);
  std::vector<double> r;
  residual_into(st, u.values(), nl, threads, r);
  std::vector<double> full(u.values().size(), 0.0);
  for (std::size_t k = 0; k < st.size(); ++k) full[st.node_of[k]] = r[k];
  return full;
}

double residual_norm(const Field& u, const Nonlinearity& nl, int threads) {
  const Stencil st(u);
  std::vector<double> r;
  residual_into(st, u.values(), nl, threads, r);
  return max_abs(r);
}

Field automatic_subsolution(const Nonlinearity& nl, const BoundarySpec& bc, const Grid2D& grid) {
  Field u(grid, bc);
  if (!has_dirichlet(u)) throw InputError("automatic subsolution needs Dirichlet data");
  const double lo = data_range(u).first;
  double c = lo;
  if (!(nl(c) >= 0.0)) {
    // Largest zero of f below the data.
    std::optional<double> best;
    for (double z : zero_set(nl.with_s_max(std::max(lo, 1e-12))).representatives())
      if (z <= lo) best = z;
    if (!best) {
      if (!(nl(0.0) >= 0.0)) throw InfeasibleError("no constant subsolution below the boundary data");
      c = 0.0;
    } else {
      c = *best;
    }
  }
  Field sub(grid, bc, c);
  return sub;
}

Field automatic_supersolution(const Nonlinearity& nl, const BoundarySpec& bc, const Grid2D& grid) {
  Field u(grid, bc);
  if (!has_dirichlet(u)) throw InputError("automatic supersolution needs Dirichlet data");
  const double hi = data_range(u).second;
  double S = hi;
  if (!(nl(S) <= 0.0)) {
    std::optional<double> next;
    for (double z : zero_set(nl).representatives())
      if (z >= hi) {
        next = z;
        break;
      }
    if (!next)
      throw InfeasibleError(
          fmt::format("no zero of f above the boundary maximum {} within s_max = {}", hi, nl.s_max()));
    S = *next;
  }
  return Field(grid, bc, S);
}

Field monotone_iterate(const Field& sub, const Field& sup, const Nonlinearity& nl, const SolveOptions& opt) {
  const auto t0 = std::chrono::steady_clock::now();
  SolveCertificate cert;
  cert.method = "monotone";
  Field u = monotone_core(sub, sup, nl, opt, opt.tol, cert);
  finish(u, std::move(cert), nl, opt, t0);
  return u;
}

Field newton_solve(const Field& init, const Nonlinearity& nl, const SolveOptions& opt) {
  const auto t0 = std::chrono::steady_clock::now();
  for (double x : init.values())
    if (!std::isfinite(x)) throw InputError("newton_solve: initial field is not finite");
  SolveCertificate cert;
  cert.method = "newton";
  Field u = newton_core(init, nl, opt, cert, 0);
  finish(u, std::move(cert), nl, opt, t0);
  return u;
}

Field solve_field(const Nonlinearity& nl, const BoundarySpec& bc, const Grid2D& grid, const SolveOptions& opt) {
  const auto t0 = std::chrono::steady_clock::now();
  SolveCertificate cert;
  Field u(grid, bc);
  switch (opt.method) {
    case SolveMethod::newton:
      cert.method = "newton";
      u = newton_core(automatic_subsolution(nl, bc, grid), nl, opt, cert, 0);
      break;
    case SolveMethod::monotone:
      cert.method = "monotone";
      u = monotone_core(automatic_subsolution(nl, bc, grid), automatic_supersolution(nl, bc, grid), nl, opt,
                        opt.tol, cert);
      break;
    case SolveMethod::automatic: {
      const Field sub = automatic_subsolution(nl, bc, grid);
      const Field sup = automatic_supersolution(nl, bc, grid);
      cert.method = "monotone+newton";
      Field coarse = monotone_core(sub, sup, nl, opt, std::max(opt.tol, opt.handoff_residual), cert);
      if (cert.residual_history.back() <= opt.tol) {
        cert.method = "monotone";
        u = std::move(coarse);
        break;
      }
      try {
        SolveCertificate polish = cert;
        u = newton_core(coarse, nl, opt, polish, cert.iterations);
        cert = std::move(polish);
      } catch (const NumericError&) {
        // Newton left its basin; finish with the (slower) monotone scheme.
        cert.method = "monotone";
        u = monotone_core(coarse, sup, nl, opt, opt.tol, cert);
      }
      break;
    }
  }
  finish(u, std::move(cert), nl, opt, t0);
  return u;
}

Field solve_quarter(const Nonlinearity& nl, const BoundarySpec& bc, const Grid2D& grid, const SolveOptions& opt) {
  if (bc.x1 != AxisKind::walled || bc.x2 != AxisKind::walled)
    throw InputError("solve_quarter needs a u0 trace at x1 = 0 and a wall at x2 = 0");
  return solve_field(nl, bc, grid, opt);
}

Field solve_half(const Nonlinearity& nl, const BoundarySpec& bc, const Grid2D& grid, const SolveOptions& opt) {
  if (bc.x1 != AxisKind::walled || bc.x2 != AxisKind::periodic)
    throw InputError("solve_half needs a u0 trace at x1 = 0 and a periodic lateral direction");
  return solve_field(nl, bc, grid, opt);
}

const char* to_string(SolveMethod m) {
  switch (m) {
    case SolveMethod::monotone: return "monotone";
    case SolveMethod::newton: return "newton";
    case SolveMethod::automatic: return "auto";
  }
  return "?";
}

}  // namespace ellab
