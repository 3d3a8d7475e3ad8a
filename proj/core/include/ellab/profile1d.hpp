#pragma once

#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "ellab/nonlinearity.hpp"

namespace ellab {

// Sampled increasing solution of V'' + f(V) = 0, V(0) = 0, V(+inf) = z, on a
// uniform xi grid. `slopes` holds W = V' at the nodes.
struct Profile1D {
  double z = 0.0;
  double slope0 = 0.0;
  std::vector<double> xi;
  std::vector<double> values;
  std::vector<double> slopes;

  // Limit actually approached; differs from z when the quadrature stalls at a
  // lower level w with F(w) = F(z) (z outside Z_f).
  double limit = 0.0;
  bool attains_limit = true;
  // Beyond exit_xi the samples follow limit - (limit - V_e) exp(-tail_rate (xi - exit_xi)).
  double exit_xi = 0.0;
  double tail_rate = 0.0;
  double tail_bound = 0.0;  // limit - V(xi_max)
  // Max |V_quad - V_ode| over nodes in [0, crosscheck_extent].
  double crosscheck_deviation = 0.0;
  double crosscheck_extent = 0.0;

  double xi_max() const { return xi.empty() ? 0.0 : xi.back(); }
  double spacing() const { return xi.size() > 1 ? xi[1] - xi[0] : 0.0; }
  // Cubic Hermite interpolation inside the grid, tail model beyond it.
  double value_at(double x) const;
  double slope_at(double x) const;
};

struct ProfileOptions {
  double exit_tol = 1e-8;
  double ode_tol = 1e-10;
  double tol_f = 1e-10;
  // Cross-check window: nodes where limit - V >= this (the saddle at V = z
  // amplifies shooting error beyond it).
  double crosscheck_gap = 1e-4;
};

double shoot_slope(const Nonlinearity& nl, double z);

Profile1D compute_profile(const Nonlinearity& nl, double z, double xi_max, int n,
                          const ProfileOptions& opt = {});

// One profile per z, computed in parallel, returned in the order of zs.
std::vector<Profile1D> compute_profiles(const Nonlinearity& nl, std::span<const double> zs,
                                        double xi_max, int n, int threads,
                                        const ProfileOptions& opt = {});

enum class ProbeEvent { none, crossed_limit, turned_back, left_below_zero };

struct ProbeReport {
  double z = 0.0;
  double delta = 0.0;
  int sign = +1;
  double slope = 0.0;
  ProbeEvent event = ProbeEvent::none;
  double event_xi = 0.0;
  double event_value = 0.0;
  // For crossed_limit: whether V was still increasing past the next zero
  // level or the end of the run.
  bool continues_upward = false;
  double final_value = 0.0;
  double final_xi = 0.0;
  // max |V_shoot - V_z| over the run (only meaningful for delta = 0).
  double profile_deviation = 0.0;
  bool inconclusive = false;
};

ProbeReport disconnectedness_probe(const Nonlinearity& nl, double z, double delta, int sign,
                                   double xi_max);

double profile_residual(const Profile1D& p, const Nonlinearity& nl);
double default_residual_tol(const Profile1D& p);

void write_profile_csv(std::ostream& out, const Profile1D& p);
Profile1D read_profile_csv(std::istream& in, double z);

const char* to_string(ProbeEvent e);

}  // namespace ellab
