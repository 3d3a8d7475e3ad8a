#pragma once

#include <optional>
#include <vector>

#include "ellab/field.hpp"
#include "ellab/nonlinearity.hpp"
#include "ellab/profile1d.hpp"

namespace ellab {

// Translation by h in x1: restriction to [h, L1], re-indexed from 0.
Field shift(const Field& u, double h);

struct MEstimate {
  double M = 0.0;
  double m = 0.0;
  std::vector<double> fracs;
  std::vector<double> window_M;
  std::vector<double> window_m;
  // max |Delta M|, |Delta m| between successive windows.
  double cauchy = 0.0;
};

MEstimate estimate_M(const Field& u, const std::vector<double>& window_fracs = {0.5, 0.625, 0.75, 0.875});

// A limit candidate: the profile V_z for quarter problems, the constant z
// for half problems.
struct Candidate {
  double z = 0.0;
  std::optional<Profile1D> profile;

  double operator()(double x2) const { return profile ? profile->value_at(x2) : z; }
};

struct OmegaOptions {
  int h_count = 16;
  double h_frac = 0.8;
  double conv_tol = 1e-2;
  double margin_factor = 2.0;
  // Quarter problems compare on x2 in [0, window_frac * L2].
  double window_frac = 0.75;
  std::vector<double> M_windows = {0.5, 0.625, 0.75, 0.875};
  int threads = 1;
};

struct TrajectoryReport {
  std::vector<double> h;
  std::vector<double> z;                       // candidate limits
  std::vector<std::vector<double>> distances;  // [candidate][h]
  std::optional<double> detected_z;
  bool converged = false;
  std::vector<double> ambiguous;  // best two candidates when not unique
  double final_distance = 0.0;
  double margin_ratio = 0.0;  // second-best / best final distance
  double M_estimate = 0.0;
  double m_estimate = 0.0;
  double M_cauchy = 0.0;
  double tail_slope = 0.0;  // d log d / dh over the second half of the h grid
};

// 16 log-spaced shifts up to h_frac * L1 on grid multiples, strictly increasing.
std::vector<double> shift_grid(const Grid2D& grid, int count, double frac);

TrajectoryReport omega_limit(const Field& u, const std::vector<Candidate>& candidates,
                             const OmegaOptions& opt = {});

enum class ProblemKind { quarter, half };

struct AttractorEstimate {
  ProblemKind kind = ProblemKind::quarter;
  double M_cap = 0.0;
  std::vector<Candidate> elements;
};

struct AttractorOptions {
  double xi_max = 30.0;
  int n = 1200;
  int threads = 1;
  double tol_f = 1e-10;
  ProfileOptions profile;
};

AttractorEstimate attractor_table(const Nonlinearity& nl, double M_cap, ProblemKind kind,
                                  const AttractorOptions& opt = {});

// Rectangle of nodes in physical coordinates (inclusive).
struct Window {
  double x1_lo = 0.0;
  double x1_hi = 0.0;
  double x2_lo = 0.0;
  double x2_hi = 0.0;
};

Window whole_domain(const Field& u);

// order 0: sup |u|. order 2: sup |u| + max first central difference + max
// second difference, each maximized over both directions.
double window_norm(const Field& u, const Window& w, int order);

struct WindowExtrema {
  double min = 0.0;
  double max = 0.0;
};
WindowExtrema window_extrema(const Field& u, const Window& w);

const char* to_string(ProblemKind k);

}  // namespace ellab
