#include <filesystem>
#include <fstream>
#include <sstream>

#include <gtest/gtest.h>
#include <nlohmann/json.hpp>

#include "ellab/cli/app.hpp"
#include "ellab/cli/config.hpp"
#include "ellab/cli/outputs.hpp"
#include "ellab/cli/u0.hpp"
#include "ellab/error.hpp"

using namespace ellab;
using namespace ellab::cli;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const fs::path p = fs::path(::testing::TempDir()) / ("ellab_cli_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

std::string write_config(const fs::path& dir, const ExperimentConfig& cfg) {
  const fs::path p = dir / "config.json";
  std::ofstream(p) << serialize(cfg);
  return p.string();
}

ExperimentConfig small_quarter(const fs::path& out) {
  ExperimentConfig c;
  c.nonlinearity.name = "logistic";
  c.domain = {"quarter", 12.0, 8.0, 0.25, "bump:4,2,0.5", "neumann", "neumann"};
  c.solver.tol = 1e-10;
  c.output.dir = out.string();
  return c;
}

int invoke(std::vector<std::string> args, std::string* err_text = nullptr) {
  std::ostringstream out, err;
  const int code = run_cli(args, out, err);
  if (err_text) *err_text = err.str();
  return code;
}

}  // namespace

TEST(Config, DefaultRoundTrip) {
  const ExperimentConfig a;
  EXPECT_EQ(parse_config(serialize(a)), a);
}

TEST(Config, ModifiedRoundTrip) {
  ExperimentConfig a;
  a.seed = 18446744073709551615ull;
  a.nonlinearity = {"cantor:3", 1.0};
  a.domain.u0 = "profile:1";
  a.analysis.profile_z = {0.1 + 0.2, 1.0 / 3.0};
  a.analysis.slide = {true, {1.5, 2.25}, {7.0, 2.25}, 33};
  a.analysis.sweep.kind = "periodic-box";
  a.output.dump_fields = true;
  const ExperimentConfig b = parse_config(serialize(a));
  EXPECT_EQ(a, b);
  EXPECT_EQ(serialize(a), serialize(b));
}

TEST(Config, PartialSectionsKeepDefaults) {
  const ExperimentConfig c = parse_config(R"({"domain": {"L1": 20}})");
  EXPECT_EQ(c.domain.L1, 20.0);
  EXPECT_EQ(c.domain.L2, ExperimentConfig{}.domain.L2);
}

TEST(Config, UnknownKeysRejectedWithPath) {
  try {
    parse_config(R"({"analysis": {"bubble": {"zz": 1}}})");
    FAIL();
  } catch (const InputError& e) {
    EXPECT_NE(std::string(e.what()).find("analysis.bubble.zz"), std::string::npos) << e.what();
  }
  EXPECT_THROW(parse_config(R"({"outputs": {}})"), InputError);
  EXPECT_THROW(parse_config(R"({"solver": {"threads": 1.5}})"), InputError);
}

TEST(Config, SyntaxErrorsAreLineAnchored) {
  try {
    parse_config("{\n  \"seed\": 1,\n  \"domain\": {\"L1\": 60,,}\n}\n", "exp.json");
    FAIL();
  } catch (const InputError& e) {
    EXPECT_EQ(std::string(e.what()).rfind("exp.json:3:", 0), 0u) << e.what();
  }
}

TEST(Config, ValidationRejectsBadValues) {
  ExperimentConfig c;
  EXPECT_NO_THROW(validate(c));
  c.domain.kind = "cube";
  EXPECT_THROW(validate(c), InputError);
  c = {};
  c.domain.h = 0.7;
  EXPECT_THROW(validate(c), InputError);
  c = {};
  c.domain.u0 = "bump:1,2";
  EXPECT_THROW(validate(c), InputError);
  c = {};
  c.nonlinearity.name = "cosine";
  EXPECT_THROW(validate(c), InputError);
  c = {};
  c.analysis.M_windows = {0.8, 0.5};
  EXPECT_THROW(validate(c), InputError);
  c = {};
  c.domain.kind = "half";
  c.domain.top = "dirichlet:1";
  EXPECT_THROW(validate(c), InputError);
}

TEST(U0, Specs) {
  const auto nl = Nonlinearity::logistic();
  const std::vector<double> x{0.0, 9.0, 10.0, 11.0, 15.0};
  const auto b = sample_u0(parse_u0("bump:10,5,0.5"), nl, x);
  EXPECT_EQ(b[0], 0.0);
  EXPECT_DOUBLE_EQ(b[2], 0.5);
  EXPECT_NEAR(b[1], b[3], 1e-15);
  EXPECT_EQ(b[4], 0.0);
  EXPECT_EQ(sample_u0(parse_u0("constant:2.5"), nl, x)[3], 2.5);
  const auto p = sample_u0(parse_u0("profile:1"), nl, x);
  EXPECT_EQ(p[0], 0.0);
  EXPECT_NEAR(p[4], 1.0, 1e-4);
  const fs::path dir = scratch("u0");
  std::ofstream(dir / "t.csv") << "x2,u\n0,0\n10,1\n";
  const auto t = sample_u0(parse_u0("table:" + (dir / "t.csv").string()), nl, x);
  EXPECT_DOUBLE_EQ(t[1], 0.9);
  EXPECT_DOUBLE_EQ(t[4], 1.0);
  EXPECT_THROW(parse_u0("spline:1"), InputError);
  EXPECT_THROW(parse_u0("constant:-1"), InputError);
  EXPECT_THROW(sample_u0(parse_u0("table:/nonexistent/t.csv"), nl, x), IoError);
  EXPECT_EQ(parse_far("dirichlet:2"), 2.0);
  EXPECT_FALSE(parse_far("neumann").has_value());
}

TEST(Outputs, Sha256KnownVector) {
  const fs::path dir = scratch("sha");
  std::ofstream(dir / "abc.txt", std::ios::binary) << "abc";
  EXPECT_EQ(sha256_file(dir / "abc.txt"), "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
}

TEST(Cli, RunWritesArtifactsAndManifest) {
  const fs::path dir = scratch("run");
  const std::string cfg = write_config(dir, small_quarter(dir / "out"));
  ASSERT_EQ(invoke({"run", cfg}), exit_ok);
  for (const char* f : {"field.csv", "summary.json", "trajectory.json", "trajectory.svg", "profiles.json",
                        "profile_1.csv", "analysis.json", "checks.json", "manifest.json"})
    EXPECT_TRUE(fs::exists(dir / "out" / f)) << f;
  const auto manifest = nlohmann::json::parse(read_file(dir / "out" / "manifest.json"));
  ASSERT_FALSE(manifest["files"].empty());
  for (const auto& e : manifest["files"]) {
    const fs::path p = dir / "out" / e["path"].get<std::string>();
    EXPECT_EQ(e["sha256"], sha256_file(p));
    EXPECT_EQ(e["bytes"].get<std::uintmax_t>(), fs::file_size(p));
  }
  std::ifstream field(dir / "out" / "field.csv");
  std::string header;
  std::getline(field, header);
  EXPECT_EQ(header, "x1,x2,u");
  const auto summary = nlohmann::json::parse(read_file(dir / "out" / "summary.json"));
  for (const char* k : {"residual", "iterations", "method", "grid", "boundary", "wall_time_ms"})
    EXPECT_TRUE(summary.contains(k)) << k;
  const auto traj = nlohmann::json::parse(read_file(dir / "out" / "trajectory.json"));
  for (const char* k : {"detected_z", "converged", "M", "m", "tail_slope", "distances"})
    EXPECT_TRUE(traj.contains(k)) << k;
}

TEST(Cli, GlobalFlagsOverrideConfig) {
  const fs::path dir = scratch("flags");
  const std::string cfg = write_config(dir, small_quarter(dir / "ignored"));
  ASSERT_EQ(invoke({"--config", cfg, "--out", (dir / "chosen").string(), "--seed", "7", "--threads", "2",
                 "solve-quarter"}),
            exit_ok);
  EXPECT_TRUE(fs::exists(dir / "chosen" / "field.csv"));
  EXPECT_FALSE(fs::exists(dir / "ignored"));
  const auto echoed = parse_config(read_file(dir / "chosen" / "config.json"));
  EXPECT_EQ(echoed.seed, 7u);
  EXPECT_EQ(echoed.solver.threads, 2);
}

TEST(Cli, ExitCodes) {
  const fs::path dir = scratch("codes");
  std::ofstream(dir / "bad.json") << "{\n  \"seed\": 1,\n  \"domain\": {\n}\n";
  std::string err;
  EXPECT_EQ(invoke({"run", (dir / "bad.json").string()}, &err), exit_input);
  EXPECT_NE(err.find("bad.json:"), std::string::npos) << err;

  EXPECT_EQ(invoke({"eigen", "--out", "/proc/ellab-unwritable/out"}), exit_io);
  EXPECT_EQ(invoke({"run", (dir / "missing.json").string()}), exit_io);

  ExperimentConfig slow = small_quarter(dir / "slow");
  slow.solver.method = "monotone";
  slow.solver.max_monotone_iterations = 2;
  EXPECT_EQ(invoke({"solve-quarter", "--config", write_config(dir, slow)}), exit_numeric);

  EXPECT_EQ(invoke({}), exit_input);
  EXPECT_EQ(invoke({"frobnicate"}), exit_input);
  EXPECT_EQ(invoke({"--help"}), exit_ok);
}

TEST(Cli, PlotIsDeterministicAndChecksSchema) {
  const fs::path dir = scratch("plot");
  const nlohmann::json report{
      {"distances", {{{"h", 1.0}, {"z", 0.0}, {"d", 1.0}}, {{"h", 2.0}, {"z", 0.0}, {"d", 0.9}},
                     {{"h", 1.0}, {"z", 1.0}, {"d", 0.1}}, {{"h", 2.0}, {"z", 1.0}, {"d", 1e-3}}}}};
  std::ofstream(dir / "t.json") << report.dump();
  ASSERT_EQ(invoke({"plot", (dir / "t.json").string(), (dir / "a.svg").string()}), exit_ok);
  ASSERT_EQ(invoke({"plot", (dir / "t.json").string(), (dir / "b.svg").string()}), exit_ok);
  const std::string a = read_file(dir / "a.svg");
  EXPECT_EQ(a, read_file(dir / "b.svg"));
  std::size_t lines = 0;
  for (std::size_t p = a.find("<polyline"); p != std::string::npos; p = a.find("<polyline", p + 1)) ++lines;
  EXPECT_EQ(lines, 2u);
  EXPECT_NE(a.find("shift h"), std::string::npos);
  EXPECT_NE(a.find("z = 1"), std::string::npos);

  std::ofstream(dir / "empty.json") << R"({"distances": []})";
  EXPECT_EQ(invoke({"plot", (dir / "empty.json").string(), (dir / "c.svg").string()}), exit_input);
  std::ofstream(dir / "wrong.json") << R"({"distances": [{"h": 1}]})";
  EXPECT_EQ(invoke({"plot", (dir / "wrong.json").string(), (dir / "c.svg").string()}), exit_input);
}
