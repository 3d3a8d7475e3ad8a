#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

namespace ellab::cli {

struct NonlinearityConfig {
  std::string name = "logistic";
  std::optional<double> s_max;
  bool operator==(const NonlinearityConfig&) const = default;
};

struct DomainConfig {
  std::string kind = "quarter";  // quarter | half
  double L1 = 60.0;
  double L2 = 30.0;
  double h = 0.25;
  std::string u0 = "constant:0";
  std::string right = "neumann";
  std::string top = "neumann";
  bool operator==(const DomainConfig&) const = default;
};

struct SolverConfig {
  std::string method = "auto";
  double tol = 1e-8;
  int max_monotone_iterations = 20000;
  int max_newton_iterations = 50;
  int threads = 1;
  bool operator==(const SolverConfig&) const = default;
};

struct BubbleConfig {
  double z = 1.0;
  double eps = 0.1;
  int N = 2;
  std::vector<double> growth_radii{5.0, 10.0, 20.0};
  bool operator==(const BubbleConfig&) const = default;
};

struct SlideConfig {
  bool enabled = false;
  std::array<double, 2> from{15.0, 10.0};
  std::array<double, 2> to{45.0, 10.0};
  int steps = 0;
  bool operator==(const SlideConfig&) const = default;
};

struct EigenConfig {
  int N = 2;
  double R = 1.0;
  int n = 1024;
  bool operator==(const EigenConfig&) const = default;
};

struct SweepConfig {
  bool enabled = false;
  std::string kind = "both";  // periodic-box | halfspace-strip | both
  int trials = 20;
  double box_L = 16.0;
  double strip_L1 = 16.0;
  double strip_height = 20.0;
  double h = 0.25;
  bool operator==(const SweepConfig&) const = default;
};

struct AnalysisConfig {
  double M_cap = 2.0;
  std::vector<double> profile_z;  // empty: Z_f within [0, M_cap]
  double profile_xi_max = 30.0;
  int profile_n = 1200;
  double probe_delta = 0.1;
  double conv_tol = 1e-2;
  double margin_factor = 2.0;
  int h_count = 16;
  double window_frac = 0.75;
  std::vector<double> M_windows{0.5, 0.625, 0.75, 0.875};
  BubbleConfig bubble;
  SlideConfig slide;
  EigenConfig eigen;
  SweepConfig sweep;
  bool operator==(const AnalysisConfig&) const = default;
};

struct OutputConfig {
  std::string dir = "out";
  bool dump_fields = false;
  bool plot = true;
  bool operator==(const OutputConfig&) const = default;
};

struct ExperimentConfig {
  std::uint64_t seed = 42;
  NonlinearityConfig nonlinearity;
  DomainConfig domain;
  SolverConfig solver;
  AnalysisConfig analysis;
  OutputConfig output;
  bool operator==(const ExperimentConfig&) const = default;
};

// Parses JSON text; syntax errors carry `origin:line:column`, unknown keys and
// wrong types carry the dotted key path. Throws InputError.
ExperimentConfig parse_config(const std::string& text, const std::string& origin = "<config>");
// Reads and parses a file; unreadable files raise IoError.
ExperimentConfig load_config(const std::string& path);

nlohmann::json to_json(const ExperimentConfig& cfg);
std::string serialize(const ExperimentConfig& cfg);

// Semantic checks that need no computation (names, ranges, grid multiples,
// u0 syntax). Throws InputError.
void validate(const ExperimentConfig& cfg);

}  // namespace ellab::cli
