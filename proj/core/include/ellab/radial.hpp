#pragma once

#include <string>
#include <vector>

#include "ellab/field.hpp"
#include "ellab/nonlinearity.hpp"

namespace ellab {

// Principal Dirichlet eigenpair of -Lap on the ball B(0, R) in R^N, radial
// samples on r_k = k R / n with phi(0) = 1 and phi(R) = 0.
struct Eigenpair {
  int N = 2;
  double R = 1.0;
  double lambda = 0.0;
  std::vector<double> r;
  std::vector<double> phi;
  double rayleigh = 0.0;  // volume-weighted Rayleigh quotient of phi
  int iterations = 0;
};

Eigenpair dirichlet_eigenpair(int N, double R, int n = 1024);

// Compactly supported radial subsolution: v'' + (N-1)/r v' + g(v) = 0 on
// [0, R'], v'(0) = 0, v(R') = 0, v(0) >= z - eps.
struct RadialBubble {
  int N = 2;
  double z = 0.0;
  double eps = 0.0;
  bool feasible = false;
  std::string message;
  double R_prime = 0.0;
  double v0 = 0.0;
  std::vector<double> r;
  std::vector<double> v;
  std::vector<double> dv;
  double energy = 0.0;  // I_{R'}(v)

  // Linear interpolation in r; zero outside the support.
  double value_at(double rho) const;
};

struct BubbleOptions {
  double r_max = 200.0;
  int samples = 4097;
  double ode_tol = 1e-11;
};

RadialBubble radial_bubble(const Nonlinearity& g, double z, double eps, int N = 2,
                           const BubbleOptions& opt = {});

struct GrowthPoint {
  double r = 0.0;
  double ramp_energy = 0.0;  // I_r(w_r)
  double lower_bound = 0.0;  // alpha_N r^N G(z - eps)
};

struct BubbleEnergy {
  double I_v = 0.0;
  double I_w = 0.0;  // ramp test function at r = R'
  std::vector<GrowthPoint> growth;
  double ramp_exponent = 0.0;   // least-squares slope of log I_r(w_r) in log r
  double bound_exponent = 0.0;  // same for the lower bound
};

// Volume of the unit ball in R^N.
double unit_ball_volume(int N);
// I_r(w_r) for the ramp equal to z inside radius r - 1 and z (r - |x|) on the shell.
double ramp_energy(const Nonlinearity& g, double z, double r, int N);

BubbleEnergy bubble_energy(const RadialBubble& b, const Nonlinearity& g, double z,
                           const std::vector<double>& growth_radii = {5.0, 10.0, 20.0});

struct Point2 {
  double x1 = 0.0;
  double x2 = 0.0;
};

struct SlidingReport {
  int steps = 0;
  std::vector<double> t;
  std::vector<double> margins;  // min_x (u - v(. - y_t)) per placement
  double min_margin = 0.0;
  double worst_t = 0.0;
  bool failed = false;
  double failure_t = 0.0;  // first t with nonpositive margin
  double lower_bound = 0.0;  // v(0) - max(0, -min_margin)
};

// Slides the bubble centre from `from` to `to` in `steps` placements
// (steps <= 0 picks 64 per unit length), sampling the bubble bilinearly.
SlidingReport sliding_verify(const Field& u, const RadialBubble& b, Point2 from, Point2 to, int steps = 0);

}  // namespace ellab
