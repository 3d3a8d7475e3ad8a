#include "ellab/cli/reports.hpp"

#include <cmath>
#include <sstream>

#include <fmt/format.h>

namespace ellab::cli {

using nlohmann::json;

namespace {

json axis_json(const Field& u) {
  const auto& b = u.boundary();
  json j{{"x1", to_string(b.x1)}, {"x2", to_string(b.x2)}};
  if (b.x1 == AxisKind::walled) j["right"] = to_string(b.right);
  if (b.x2 == AxisKind::walled) j["top"] = to_string(b.top);
  return j;
}

json optional_number(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }

}  // namespace

double first_integral_error(const Profile1D& p, const Nonlinearity& nl) {
  double err = 0.0;
  for (std::size_t k = 0; k < p.values.size(); ++k) {
    const double W = p.slopes[k];
    err = std::max(err, std::abs(W * W - 2.0 * nl.integral(p.values[k], p.z)));
  }
  return err;
}

json zero_set_json(const ZeroSet& E) {
  json intervals = json::array();
  for (const auto& [a, b] : E.intervals) intervals.push_back({a, b});
  return {{"points", E.points}, {"intervals", intervals}, {"tol_f", E.tol_f}};
}

json analysis_json(const Nonlinearity& nl) {
  const ZeroSet E = zero_set(nl);
  const ZeroSet Z = compute_Zf(nl);
  const HypothesisReport h = check_hypotheses(nl);
  const auto ratios = [](const std::vector<RatioEstimate>& rs) {
    json a = json::array();
    for (const auto& r : rs)
      a.push_back({{"z", r.z}, {"min_ratio", r.min_ratio}, {"max_ratio", r.max_ratio}, {"verdict", to_string(r.verdict)}});
    return a;
  };
  json hyp{{"h1", {{"verdict", to_string(h.h1)}, {"mu", h.mu}, {"mu_prime", h.mu_prime}}},
           {"h2", {{"verdict", to_string(h.h2)}, {"ratios", ratios(h.h2_ratios)}}},
           {"h3", {{"verdict", to_string(h.h3)}, {"ratios", ratios(h.h3_ratios)}}}};
  if (h.origin_ratio)
    hyp["h1"]["origin_ratio"] = {{"min_ratio", h.origin_ratio->min_ratio}, {"verdict", to_string(h.origin_ratio->verdict)}};
  return {{"nonlinearity", {{"name", nl.name()}, {"kind", to_string(nl.kind())}, {"s_max", nl.s_max()},
                            {"lipschitz_estimate", nl.lipschitz_estimate()}}},
          {"zero_set", zero_set_json(E)},
          {"profile_limits",
           {{"points", Z.points}, {"borderline", Z.borderline}, {"origin_by_convention", Z.origin_by_convention}}},
          {"hypotheses", hyp}};
}

json profile_json(const Profile1D& p, const Nonlinearity& nl, const std::string& file) {
  return {{"z", p.z},
          {"file", file},
          {"slope0", p.slope0},
          {"limit", p.limit},
          {"attains_limit", p.attains_limit},
          {"xi_max", p.xi_max()},
          {"nodes", p.xi.size()},
          {"exit_xi", p.exit_xi},
          {"tail_rate", p.tail_rate},
          {"tail_bound", p.tail_bound},
          {"ode_residual", p.values.size() >= 3 ? profile_residual(p, nl) : 0.0},
          {"first_integral_error", first_integral_error(p, nl)},
          {"crosscheck_deviation", p.crosscheck_deviation},
          {"crosscheck_extent", p.crosscheck_extent}};
}

json summary_json(const Field& u, const std::string& kind, const std::string& u0) {
  const auto& g = u.grid();
  json j{{"grid", {{"L1", g.L1}, {"L2", g.L2}, {"h", g.h}, {"n1", g.n1}, {"n2", g.n2}}},
         {"boundary", axis_json(u)}};
  j["boundary"]["kind"] = kind;
  j["boundary"]["u0"] = u0;
  if (const auto& c = u.certificate()) {
    j["residual"] = c->residual;
    j["iterations"] = c->iterations;
    j["method"] = c->method;
    j["min_value"] = c->min_value;
    j["maximum_principle_violation"] = c->maximum_principle_violation;
    j["wall_time_ms"] = c->wall_time_ms;
  }
  return j;
}

json trajectory_json(const TrajectoryReport& r, ProblemKind kind) {
  json dist = json::array();
  for (std::size_t c = 0; c < r.z.size(); ++c)
    for (std::size_t k = 0; k < r.h.size(); ++k) dist.push_back({{"h", r.h[k]}, {"z", r.z[c]}, {"d", r.distances[c][k]}});
  return {{"kind", to_string(kind)},
          {"detected_z", optional_number(r.detected_z)},
          {"converged", r.converged},
          {"M", r.M_estimate},
          {"m", r.m_estimate},
          {"M_cauchy", r.M_cauchy},
          {"tail_slope", r.tail_slope},
          {"final_distance", r.final_distance},
          {"margin_ratio", r.margin_ratio},
          {"ambiguous", r.ambiguous},
          {"candidates", r.z},
          {"distances", dist}};
}

json bubble_json(const RadialBubble& b, const BubbleEnergy* energy) {
  json j{{"N", b.N}, {"z", b.z}, {"eps", b.eps}, {"feasible", b.feasible}, {"message", b.message},
         {"R_prime", b.R_prime}, {"v0", b.v0}, {"energy", b.energy}};
  if (energy) {
    json growth = json::array();
    for (const auto& g : energy->growth)
      growth.push_back({{"r", g.r}, {"ramp_energy", g.ramp_energy}, {"lower_bound", g.lower_bound}});
    j["energy_comparison"] = {{"I_v", energy->I_v},
                              {"I_w", energy->I_w},
                              {"growth", growth},
                              {"ramp_exponent", energy->ramp_exponent},
                              {"bound_exponent", energy->bound_exponent}};
  }
  return j;
}

json eigen_json(const Eigenpair& e) {
  return {{"N", e.N}, {"R", e.R}, {"lambda", e.lambda}, {"rayleigh", e.rayleigh},
          {"iterations", e.iterations}, {"nodes", e.r.size()}};
}

json slide_json(const SlidingReport& s, const RadialBubble& b, Point2 from, Point2 to) {
  return {{"from", {from.x1, from.x2}},
          {"to", {to.x1, to.x2}},
          {"bubble", {{"R_prime", b.R_prime}, {"v0", b.v0}, {"z", b.z}, {"eps", b.eps}}},
          {"steps", s.steps},
          {"min_margin", s.min_margin},
          {"worst_t", s.worst_t},
          {"failed", s.failed},
          {"failure_t", s.failure_t},
          {"lower_bound", s.lower_bound},
          {"t", s.t},
          {"margins", s.margins}};
}

json sweep_json(const SweepReport& r) {
  const bool box = r.domain == SweepDomain::periodic_box;
  json recs = json::array();
  for (const auto& t : r.records) {
    json j{{"trial", t.trial},   {"method", t.method}, {"converged", t.converged}, {"iterations", t.iterations},
           {"residual", t.residual}, {"min", t.min},   {"max", t.max},             {"mean", t.mean},
           {"deviation", t.deviation}};
    if (box) {
      j["zero_distance"] = t.zero_distance;
      j["constant"] = t.constant;
    } else {
      j["lateral_variation"] = t.lateral_variation;
      j["profile_distance"] = t.profile_distance;
      j["matched_z"] = t.matched_z;
      j["one_dimensional"] = t.one_dimensional;
    }
    recs.push_back(j);
  }
  json j{{"domain", to_string(r.domain)}, {"banner", r.banner}, {"seed", r.seed},
         {"trials", r.trials}, {"converged", r.converged}, {"max_deviation", r.max_deviation}};
  if (box) {
    j["constant_count"] = r.constant_count;
    j["zero_distance"] = r.zero_distance;
  } else {
    j["one_dimensional_count"] = r.constant_count;
    j["max_lateral_variation"] = r.max_lateral_variation;
    j["max_profile_distance"] = r.max_profile_distance;
  }
  j["records"] = recs;
  return j;
}

std::string field_csv(const Field& u) {
  std::ostringstream os;
  write_field_csv(os, u);
  return os.str();
}

std::string profile_csv(const Profile1D& p) {
  std::ostringstream os;
  write_profile_csv(os, p);
  return os.str();
}

std::string bubble_csv(const RadialBubble& b) {
  std::string s = "r,v,dv\n";
  for (std::size_t k = 0; k < b.r.size(); ++k) s += fmt::format("{:.17g},{:.17g},{:.17g}\n", b.r[k], b.v[k], b.dv[k]);
  return s;
}

std::string eigen_csv(const Eigenpair& e) {
  std::string s = "r,phi\n";
  for (std::size_t k = 0; k < e.r.size(); ++k) s += fmt::format("{:.17g},{:.17g}\n", e.r[k], e.phi[k]);
  return s;
}

std::string profile_file_name(double z) { return fmt::format("profile_{:.6g}.csv", z); }

}  // namespace ellab::cli
