#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "ellab/field.hpp"
#include "ellab/nonlinearity.hpp"
#include "ellab/profile1d.hpp"

namespace ellab {

enum class SweepDomain { periodic_box, halfspace_strip };

struct TrialRecord {
  int trial = 0;
  std::string method;  // "newton", "parabolic" or "none"
  bool converged = false;
  int iterations = 0;
  double residual = 0.0;
  double min = 0.0;
  double max = 0.0;
  double mean = 0.0;
  double deviation = 0.0;       // max - min
  double zero_distance = 0.0;   // dist(mean, E)
  bool constant = false;
  // Strip only.
  double lateral_variation = 0.0;  // max over rows of (row max - row min)
  double profile_distance = 0.0;   // min over z of max |u - V_z(x2)|
  double matched_z = 0.0;
  bool one_dimensional = false;
};

struct SweepReport {
  SweepDomain domain = SweepDomain::periodic_box;
  std::string banner;
  int trials = 0;
  int converged = 0;
  // periodic box: constant fields; strip: fields of x2 only (lateral variation < const_tol).
  int constant_count = 0;
  double max_deviation = 0.0;
  double zero_distance = 0.0;
  double max_lateral_variation = 0.0;
  double max_profile_distance = 0.0;
  std::uint64_t seed = 0;
  std::vector<TrialRecord> records;
  // Converged fields in trial order when requested (for --dump-fields).
  std::vector<Field> fields;
};

struct SweepOptions {
  int threads = 1;
  double newton_tol = 1e-10;
  // Newton rarely recovers from a random start; the parabolic flow takes over.
  int newton_iterations = 6;
  double converged_tol = 1e-8;  // residual accepted after the parabolic fallback
  double const_tol = 1e-4;
  int max_parabolic_steps = 400000;
  double steady_update = 1e-12;
  double amplitude_max = 3.0;
  bool keep_fields = false;
  // Profile candidates for the strip.
  double profile_xi_max = 40.0;
  int profile_n = 1600;
};

// Rejects nonlinearities with an empty zero set, or satisfying neither the
// nonnegativity hypothesis nor the sign-pattern pair.
void check_sweep_precondition(const Nonlinearity& nl);

// Random band-limited nonnegative start for trial `trial` of a sweep.
Field random_initial_field(const Grid2D& grid, const BoundarySpec& bc, std::uint64_t seed, int trial,
                           double amplitude_max = 3.0);

// One solve from a given start: damped Newton, then explicit parabolic flow.
TrialRecord liouville_trial(const Nonlinearity& nl, Field& u, const SweepOptions& opt = {});

SweepReport periodic_box_sweep(const Nonlinearity& nl, int trials, const Grid2D& box, std::uint64_t seed,
                               const SweepOptions& opt = {});
SweepReport halfspace_strip_sweep(const Nonlinearity& nl, int trials, const Grid2D& strip, std::uint64_t seed,
                                  const SweepOptions& opt = {});

// Classifies a strip field against the profiles of `nl`.
void classify_strip(const Field& u, const std::vector<Profile1D>& profiles, double const_tol, TrialRecord& rec);
std::vector<Profile1D> strip_profiles(const Nonlinearity& nl, const SweepOptions& opt = {});

struct FloorCurve {
  std::vector<double> t;
  std::vector<double> xi;
  bool blow_up = false;
  double blow_up_time = 0.0;
};

// xi' = f(xi), xi(0) = m, sampled at `samples` uniform times on [0, t_max].
FloorCurve parabolic_floor(const Nonlinearity& nl, double m, double t_max, int samples = 201);

const char* to_string(SweepDomain d);

}  // namespace ellab
