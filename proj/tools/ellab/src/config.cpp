#include "ellab/cli/config.hpp"

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>

#include <fmt/format.h>

#include "ellab/cli/u0.hpp"
#include "ellab/error.hpp"
#include "ellab/field.hpp"
#include "ellab/nonlinearity.hpp"

namespace ellab::cli {

using nlohmann::json;

namespace {

// Reads the members of one JSON object, remembering which keys were used so
// that leftovers can be rejected.
class Section {
 public:
  Section(const json& j, std::string path) : j_(j), path_(std::move(path)) {
    if (!j_.is_object()) fail("", "expected an object");
  }

  void get(const char* key, double& out) {
    if (const json* v = find(key)) {
      if (!v->is_number()) fail(key, "expected a number");
      out = v->get<double>();
    }
  }
  void get(const char* key, int& out) {
    if (const json* v = find(key)) {
      if (!v->is_number_integer()) fail(key, "expected an integer");
      out = v->get<int>();
    }
  }
  void get(const char* key, std::uint64_t& out) {
    if (const json* v = find(key)) {
      if (!v->is_number_unsigned() && !(v->is_number_integer() && v->get<long long>() >= 0))
        fail(key, "expected a nonnegative integer");
      out = v->get<std::uint64_t>();
    }
  }
  void get(const char* key, bool& out) {
    if (const json* v = find(key)) {
      if (!v->is_boolean()) fail(key, "expected true or false");
      out = v->get<bool>();
    }
  }
  void get(const char* key, std::string& out) {
    if (const json* v = find(key)) {
      if (!v->is_string()) fail(key, "expected a string");
      out = v->get<std::string>();
    }
  }
  void get(const char* key, std::optional<double>& out) {
    if (const json* v = find(key)) {
      if (v->is_null()) {
        out.reset();
        return;
      }
      if (!v->is_number()) fail(key, "expected a number or null");
      out = v->get<double>();
    }
  }
  void get(const char* key, std::vector<double>& out) {
    if (const json* v = find(key)) {
      if (!v->is_array()) fail(key, "expected an array of numbers");
      out.clear();
      for (const auto& e : *v) {
        if (!e.is_number()) fail(key, "expected an array of numbers");
        out.push_back(e.get<double>());
      }
    }
  }
  void get(const char* key, std::array<double, 2>& out) {
    std::vector<double> tmp(out.begin(), out.end());
    get(key, tmp);
    if (tmp.size() != 2) fail(key, "expected a point [x1, x2]");
    out = {tmp[0], tmp[1]};
  }
  // Nested object or nullptr when absent.
  std::optional<Section> child(const char* key) {
    if (const json* v = find(key)) return Section(*v, dotted(key));
    return std::nullopt;
  }

  void finish() const {
    for (const auto& [k, v] : j_.items())
      if (!used_.count(k)) fail(k, "unknown key");
  }

 private:
  const json* find(const char* key) {
    used_.insert(key);
    const auto it = j_.find(key);
    return it == j_.end() ? nullptr : &*it;
  }
  std::string dotted(const std::string& key) const { return path_.empty() ? key : path_ + "." + key; }
  [[noreturn]] void fail(const std::string& key, const std::string& msg) const {
    const std::string where = key.empty() ? (path_.empty() ? "<root>" : path_) : dotted(key);
    throw InputError(fmt::format("config: {}: {}", where, msg));
  }

  const json& j_;
  std::string path_;
  std::set<std::string> used_;
};

void read(Section s, NonlinearityConfig& c) {
  s.get("name", c.name);
  s.get("s_max", c.s_max);
  s.finish();
}

void read(Section s, DomainConfig& c) {
  s.get("kind", c.kind);
  s.get("L1", c.L1);
  s.get("L2", c.L2);
  s.get("h", c.h);
  s.get("u0", c.u0);
  s.get("right", c.right);
  s.get("top", c.top);
  s.finish();
}

void read(Section s, SolverConfig& c) {
  s.get("method", c.method);
  s.get("tol", c.tol);
  s.get("max_monotone_iterations", c.max_monotone_iterations);
  s.get("max_newton_iterations", c.max_newton_iterations);
  s.get("threads", c.threads);
  s.finish();
}

void read(Section s, AnalysisConfig& c) {
  s.get("M_cap", c.M_cap);
  s.get("profile_z", c.profile_z);
  s.get("profile_xi_max", c.profile_xi_max);
  s.get("profile_n", c.profile_n);
  s.get("probe_delta", c.probe_delta);
  s.get("conv_tol", c.conv_tol);
  s.get("margin_factor", c.margin_factor);
  s.get("h_count", c.h_count);
  s.get("window_frac", c.window_frac);
  s.get("M_windows", c.M_windows);
  if (auto b = s.child("bubble")) {
    b->get("z", c.bubble.z);
    b->get("eps", c.bubble.eps);
    b->get("N", c.bubble.N);
    b->get("growth_radii", c.bubble.growth_radii);
    b->finish();
  }
  if (auto sl = s.child("slide")) {
    sl->get("enabled", c.slide.enabled);
    sl->get("from", c.slide.from);
    sl->get("to", c.slide.to);
    sl->get("steps", c.slide.steps);
    sl->finish();
  }
  if (auto e = s.child("eigen")) {
    e->get("N", c.eigen.N);
    e->get("R", c.eigen.R);
    e->get("n", c.eigen.n);
    e->finish();
  }
  if (auto w = s.child("sweep")) {
    w->get("enabled", c.sweep.enabled);
    w->get("kind", c.sweep.kind);
    w->get("trials", c.sweep.trials);
    w->get("box_L", c.sweep.box_L);
    w->get("strip_L1", c.sweep.strip_L1);
    w->get("strip_height", c.sweep.strip_height);
    w->get("h", c.sweep.h);
    w->finish();
  }
  s.finish();
}

void read(Section s, OutputConfig& c) {
  s.get("dir", c.dir);
  s.get("dump_fields", c.dump_fields);
  s.get("plot", c.plot);
  s.finish();
}

std::pair<std::size_t, std::size_t> line_column(const std::string& text, std::size_t byte) {
  std::size_t line = 1, col = 1;
  const std::size_t end = std::min(byte > 0 ? byte - 1 : 0, text.size());
  for (std::size_t i = 0; i < end; ++i) {
    if (text[i] == '\n') {
      ++line;
      col = 1;
    } else {
      ++col;
    }
  }
  return {line, col};
}

void require(bool ok, const std::string& msg) {
  if (!ok) throw InputError("config: " + msg);
}

}  // namespace

ExperimentConfig parse_config(const std::string& text, const std::string& origin) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    const auto [line, col] = line_column(text, e.byte);
    std::string what = e.what();
    // Drop the library's "[json.exception.parse_error.101] parse error at line x, column y: " prefix.
    if (const auto p = what.find(": "); p != std::string::npos) what = what.substr(p + 2);
    throw InputError(fmt::format("{}:{}:{}: malformed JSON: {}", origin, line, col, what));
  }
  ExperimentConfig cfg;
  Section root(j, "");
  root.get("seed", cfg.seed);
  if (auto s = root.child("nonlinearity")) read(*s, cfg.nonlinearity);
  if (auto s = root.child("domain")) read(*s, cfg.domain);
  if (auto s = root.child("solver")) read(*s, cfg.solver);
  if (auto s = root.child("analysis")) read(*s, cfg.analysis);
  if (auto s = root.child("output")) read(*s, cfg.output);
  root.finish();
  return cfg;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError(fmt::format("cannot read config file {}", path));
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str(), path);
}

json to_json(const ExperimentConfig& c) {
  json j;
  j["seed"] = c.seed;
  j["nonlinearity"] = {{"name", c.nonlinearity.name}};
  if (c.nonlinearity.s_max) j["nonlinearity"]["s_max"] = *c.nonlinearity.s_max;
  const auto& d = c.domain;
  j["domain"] = {{"kind", d.kind}, {"L1", d.L1}, {"L2", d.L2}, {"h", d.h},
                 {"u0", d.u0},     {"right", d.right}, {"top", d.top}};
  const auto& s = c.solver;
  j["solver"] = {{"method", s.method},
                 {"tol", s.tol},
                 {"max_monotone_iterations", s.max_monotone_iterations},
                 {"max_newton_iterations", s.max_newton_iterations},
                 {"threads", s.threads}};
  const auto& a = c.analysis;
  j["analysis"] = {
      {"M_cap", a.M_cap},
      {"profile_z", a.profile_z},
      {"profile_xi_max", a.profile_xi_max},
      {"profile_n", a.profile_n},
      {"probe_delta", a.probe_delta},
      {"conv_tol", a.conv_tol},
      {"margin_factor", a.margin_factor},
      {"h_count", a.h_count},
      {"window_frac", a.window_frac},
      {"M_windows", a.M_windows},
      {"bubble", {{"z", a.bubble.z}, {"eps", a.bubble.eps}, {"N", a.bubble.N}, {"growth_radii", a.bubble.growth_radii}}},
      {"slide", {{"enabled", a.slide.enabled}, {"from", a.slide.from}, {"to", a.slide.to}, {"steps", a.slide.steps}}},
      {"eigen", {{"N", a.eigen.N}, {"R", a.eigen.R}, {"n", a.eigen.n}}},
      {"sweep",
       {{"enabled", a.sweep.enabled},
        {"kind", a.sweep.kind},
        {"trials", a.sweep.trials},
        {"box_L", a.sweep.box_L},
        {"strip_L1", a.sweep.strip_L1},
        {"strip_height", a.sweep.strip_height},
        {"h", a.sweep.h}}}};
  j["output"] = {{"dir", c.output.dir}, {"dump_fields", c.output.dump_fields}, {"plot", c.output.plot}};
  return j;
}

std::string serialize(const ExperimentConfig& cfg) { return to_json(cfg).dump(2) + "\n"; }

void validate(const ExperimentConfig& c) {
  Nonlinearity::parse(c.nonlinearity.name, c.nonlinearity.s_max);

  const auto& d = c.domain;
  require(d.kind == "quarter" || d.kind == "half", fmt::format("domain.kind must be quarter or half, got '{}'", d.kind));
  Grid2D::make(d.L1, d.L2, d.h);
  parse_u0(d.u0);
  parse_far(d.right);
  parse_far(d.top);
  require(d.kind == "quarter" || d.top == "neumann", "domain.top applies to quarter domains only");

  const auto& s = c.solver;
  require(s.method == "auto" || s.method == "monotone" || s.method == "newton",
          fmt::format("solver.method must be auto, monotone or newton, got '{}'", s.method));
  require(s.tol > 0.0, "solver.tol must be positive");
  require(s.max_monotone_iterations >= 1 && s.max_newton_iterations >= 1, "solver iteration limits must be >= 1");
  require(s.threads >= 1, "solver.threads must be >= 1");

  const auto& a = c.analysis;
  require(a.M_cap >= 0.0, "analysis.M_cap must be nonnegative");
  for (double z : a.profile_z) require(z >= 0.0, "analysis.profile_z entries must be nonnegative");
  require(a.profile_xi_max > 0.0, "analysis.profile_xi_max must be positive");
  require(a.profile_n >= 16, "analysis.profile_n must be >= 16");
  require(a.probe_delta >= 0.0, "analysis.probe_delta must be nonnegative");
  require(a.conv_tol > 0.0, "analysis.conv_tol must be positive");
  require(a.margin_factor >= 1.0, "analysis.margin_factor must be >= 1");
  require(a.h_count >= 2, "analysis.h_count must be >= 2");
  require(a.window_frac > 0.0 && a.window_frac <= 1.0, "analysis.window_frac must lie in (0, 1]");
  require(!a.M_windows.empty(), "analysis.M_windows must not be empty");
  for (std::size_t k = 0; k < a.M_windows.size(); ++k)
    require(a.M_windows[k] > 0.0 && a.M_windows[k] < 1.0 && (k == 0 || a.M_windows[k] > a.M_windows[k - 1]),
            "analysis.M_windows must increase inside (0, 1)");
  require(a.bubble.z > 0.0 && a.bubble.eps > 0.0 && a.bubble.eps <= a.bubble.z,
          "analysis.bubble needs z > 0 and 0 < eps <= z");
  require(a.bubble.N >= 1, "analysis.bubble.N must be >= 1");
  require(a.bubble.growth_radii.size() >= 2, "analysis.bubble.growth_radii needs at least two radii");
  for (double r : a.bubble.growth_radii) require(r > 1.0, "analysis.bubble.growth_radii must exceed 1");
  require(a.eigen.N >= 1 && a.eigen.R > 0.0 && a.eigen.n >= 32, "analysis.eigen needs N >= 1, R > 0, n >= 32");
  const auto& w = a.sweep;
  require(w.kind == "both" || w.kind == "periodic-box" || w.kind == "halfspace-strip",
          fmt::format("analysis.sweep.kind must be periodic-box, halfspace-strip or both, got '{}'", w.kind));
  require(w.trials >= 1, "analysis.sweep.trials must be >= 1");
  Grid2D::make(w.box_L, w.box_L, w.h);
  Grid2D::make(w.strip_L1, w.strip_height, w.h);

  require(!c.output.dir.empty(), "output.dir must not be empty");
}

}  // namespace ellab::cli
