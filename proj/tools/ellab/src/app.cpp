#include "ellab/cli/app.hpp"

#include <functional>
#include <optional>
#include <ostream>

#include <CLI11.hpp>
#include <fmt/format.h>
#include <fmt/ostream.h>

#include "ellab/cli/config.hpp"
#include "ellab/cli/outputs.hpp"
#include "ellab/cli/pipeline.hpp"
#include "ellab/cli/svg.hpp"
#include "ellab/error.hpp"

namespace ellab::cli {

namespace {

struct GlobalFlags {
  std::string config;
  std::optional<std::string> out;
  std::optional<std::uint64_t> seed;
  std::optional<int> threads;
  bool dump_fields = false;
};

ExperimentConfig resolve(const GlobalFlags& g) {
  ExperimentConfig cfg = g.config.empty() ? ExperimentConfig{} : load_config(g.config);
  if (g.out) cfg.output.dir = *g.out;
  if (g.seed) cfg.seed = *g.seed;
  if (g.threads) cfg.solver.threads = *g.threads;
  if (g.dump_fields) cfg.output.dump_fields = true;
  validate(cfg);
  return cfg;
}

template <class Fn>
int guarded(std::ostream& err, Fn&& fn) {
  try {
    fn();
    return exit_ok;
  } catch (const InputError& e) {
    fmt::print(err, "error: {}\n", e.what());
    return exit_input;
  } catch (const IoError& e) {
    fmt::print(err, "I/O error: {}\n", e.what());
    return exit_io;
  } catch (const NumericError& e) {
    fmt::print(err, "numeric failure: {} (achieved {:.3e})\n", e.what(), e.achieved());
    return exit_numeric;
  } catch (const InfeasibleError& e) {
    fmt::print(err, "infeasible: {}\n", e.what());
    return exit_numeric;
  } catch (const ConsistencyError& e) {
    fmt::print(err, "consistency failure: {}\n", e.what());
    return exit_numeric;
  } catch (const std::filesystem::filesystem_error& e) {
    fmt::print(err, "I/O error: {}\n", e.what());
    return exit_io;
  }
}

}  // namespace

int plot_command(const std::string& report_path, const std::string& svg_path, std::ostream& err) {
  return guarded(err, [&] {
    const std::string text = read_file(report_path);
    nlohmann::json report;
    try {
      report = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
      throw InputError(fmt::format("{}: malformed JSON at byte {}", report_path, e.byte));
    }
    write_file(svg_path, render_trajectory_svg(report));
  });
}

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Numerical experiments for semilinear elliptic problems on quarter- and half-planes", "ellab"};
  app.require_subcommand(1);
  app.fallthrough();

  GlobalFlags g;
  app.add_option("--config", g.config, "experiment configuration (JSON)");
  app.add_option("--out", g.out, "output directory (overrides output.dir)");
  app.add_option("--seed", g.seed, "random seed (overrides seed)");
  app.add_option("--threads", g.threads, "worker threads (overrides solver.threads)")->check(CLI::PositiveNumber);
  app.add_flag("--dump-fields", g.dump_fields, "also write every sweep field");

  std::function<void(Context&)> action;
  std::string report_path, svg_path;
  const auto sub = [&](const char* name, const char* help, std::function<void(Context&)> fn) {
    CLI::App* s = app.add_subcommand(name, help);
    s->callback([&action, fn] { action = fn; });
    return s;
  };
  sub("analyze-f", "zero set, profile limits and hypothesis checks", [](Context& c) { step_analyze(c); });
  sub("zf", "attainable profile limits", [](Context& c) { step_zf(c); });
  sub("profile", "one-dimensional profiles", [](Context& c) { step_profiles(c); });
  sub("solve-quarter", "solve on the quarter-plane rectangle", [](Context& c) { step_solve(c, ProblemKind::quarter); });
  sub("solve-half", "solve on the laterally periodic strip", [](Context& c) { step_solve(c, ProblemKind::half); });
  sub("bubble", "compactly supported radial subsolution", [](Context& c) {
    const RadialBubble b = step_bubble(c);
    if (!b.feasible) throw InfeasibleError(b.message);
  });
  sub("eigen", "principal Dirichlet eigenpair on a ball", [](Context& c) { step_eigen(c); });
  sub("slide", "slide the bubble under the solved field", [](Context& c) {
    const Field u = step_solve(c, problem_kind(c.cfg.domain.kind));
    step_slide(c, u);
  });
  sub("trajectory", "solve, then track the shifted solution", [](Context& c) {
    const ProblemKind kind = problem_kind(c.cfg.domain.kind);
    const Field u = step_solve(c, kind);
    step_trajectory(c, u, kind);
  });
  sub("liouville-sweep", "random-start sweeps on periodic surrogates", [](Context& c) { step_sweep(c); });
  CLI::App* run = sub("run", "full pipeline with one verdict line per check", [](Context& c) { run_pipeline(c); });
  run->add_option("config_path", g.config, "experiment configuration (JSON)");

  CLI::App* plot = app.add_subcommand("plot", "render a trajectory report as SVG");
  plot->add_option("report", report_path, "trajectory.json")->required();
  plot->add_option("svg", svg_path, "output SVG path")->required();

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) {
      out << app.help();
      return exit_ok;
    }
    fmt::print(err, "error: {}\n", e.what());
    return exit_input;
  }

  if (plot->parsed()) return plot_command(report_path, svg_path, err);
  return guarded(err, [&] {
    Context ctx(resolve(g), out);
    action(ctx);
    ctx.out.write_manifest();
  });
}

}  // namespace ellab::cli
