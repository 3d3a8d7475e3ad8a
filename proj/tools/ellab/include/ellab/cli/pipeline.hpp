#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "ellab/cli/config.hpp"
#include "ellab/cli/outputs.hpp"
#include "ellab/field.hpp"
#include "ellab/liouville.hpp"
#include "ellab/nonlinearity.hpp"
#include "ellab/profile1d.hpp"
#include "ellab/radial.hpp"
#include "ellab/trajectory.hpp"

namespace ellab::cli {

struct CheckResult {
  std::string name;
  bool pass = false;
  std::string detail;
};

// Everything a pipeline step needs: the validated configuration, the parsed
// nonlinearity and the output sink.
struct Context {
  Context(ExperimentConfig config, std::ostream& log);

  ExperimentConfig cfg;
  Nonlinearity nl;
  Outputs out;
  std::ostream& log;
  std::vector<CheckResult> checks;

  int threads() const { return cfg.solver.threads; }
  void check(std::string name, bool pass, std::string detail);
};

nlohmann::json step_analyze(Context& ctx);
nlohmann::json step_zf(Context& ctx);
std::vector<Profile1D> step_profiles(Context& ctx);
Field step_solve(Context& ctx, ProblemKind kind);
TrajectoryReport step_trajectory(Context& ctx, const Field& u, ProblemKind kind);
RadialBubble step_bubble(Context& ctx);
Eigenpair step_eigen(Context& ctx);
SlidingReport step_slide(Context& ctx, const Field& u);
std::vector<SweepReport> step_sweep(Context& ctx);

// Full experiment: analysis, profiles, solve, trajectory, optional sliding
// and sweeps, then one verdict line per check and the manifest.
void run_pipeline(Context& ctx);

ProblemKind problem_kind(const std::string& kind);

}  // namespace ellab::cli
