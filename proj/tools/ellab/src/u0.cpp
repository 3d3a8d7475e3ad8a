#include "ellab/cli/u0.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include <fmt/format.h>

#include "ellab/error.hpp"
#include "ellab/profile1d.hpp"

namespace ellab::cli {

namespace {

double to_number(const std::string& text, const std::string& context) {
  const char* begin = text.c_str();
  char* end = nullptr;
  const double v = std::strtod(begin, &end);
  if (text.empty() || end != begin + text.size() || !std::isfinite(v))
    throw InputError(fmt::format("{}: '{}' is not a number", context, text));
  return v;
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string item;
  std::istringstream in(s);
  while (std::getline(in, item, sep)) out.push_back(item);
  if (!s.empty() && s.back() == sep) out.emplace_back();
  return out;
}

std::string trim(std::string s) {
  const auto ws = [](unsigned char c) { return std::isspace(c); };
  s.erase(s.begin(), std::find_if_not(s.begin(), s.end(), ws));
  s.erase(std::find_if_not(s.rbegin(), s.rend(), ws).base(), s.end());
  return s;
}

std::vector<std::pair<double, double>> read_table(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError(fmt::format("cannot read u0 table {}", path));
  std::string line;
  std::getline(in, line);
  if (trim(line) != "x2,u") throw InputError(fmt::format("{}: expected header 'x2,u'", path));
  std::vector<std::pair<double, double>> rows;
  int lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (trim(line).empty()) continue;
    const auto cells = split(line, ',');
    const std::string where = fmt::format("{}:{}", path, lineno);
    if (cells.size() != 2) throw InputError(fmt::format("{}: expected two columns", where));
    const double x = to_number(trim(cells[0]), where);
    const double u = to_number(trim(cells[1]), where);
    if (u < 0.0) throw InputError(fmt::format("{}: u0 must be nonnegative", where));
    if (!rows.empty() && !(x > rows.back().first)) throw InputError(fmt::format("{}: x2 must increase", where));
    rows.emplace_back(x, u);
  }
  if (rows.empty()) throw InputError(fmt::format("{}: table has no rows", path));
  return rows;
}

double interpolate(const std::vector<std::pair<double, double>>& rows, double x) {
  if (x <= rows.front().first) return rows.front().second;
  if (x >= rows.back().first) return rows.back().second;
  const auto it = std::upper_bound(rows.begin(), rows.end(), x,
                                   [](double v, const std::pair<double, double>& r) { return v < r.first; });
  const auto& [x1, u1] = *it;
  const auto& [x0, u0] = *(it - 1);
  return u0 + (u1 - u0) * (x - x0) / (x1 - x0);
}

}  // namespace

U0Spec parse_u0(const std::string& spec) {
  const auto colon = spec.find(':');
  if (colon == std::string::npos) throw InputError(fmt::format("u0 '{}' must look like kind:args", spec));
  const std::string kind = spec.substr(0, colon);
  const std::string args = spec.substr(colon + 1);
  const std::string context = fmt::format("u0 '{}'", spec);
  U0Spec out;
  if (kind == "table") {
    if (args.empty()) throw InputError(context + ": missing path");
    out.kind = U0Kind::table;
    out.path = args;
    return out;
  }
  for (const auto& a : split(args, ',')) out.params.push_back(to_number(trim(a), context));
  if (kind == "constant" || kind == "profile") {
    if (out.params.size() != 1) throw InputError(context + ": expects one value");
    if (out.params[0] < 0.0) throw InputError(context + ": value must be nonnegative");
    out.kind = kind == "constant" ? U0Kind::constant : U0Kind::profile;
  } else if (kind == "bump") {
    if (out.params.size() != 3) throw InputError(context + ": expects center,width,height");
    if (!(out.params[1] > 0.0) || out.params[2] < 0.0)
      throw InputError(context + ": width must be positive and height nonnegative");
    out.kind = U0Kind::bump;
  } else {
    throw InputError(context + ": unknown kind (constant, bump, profile, table)");
  }
  return out;
}

std::vector<double> sample_u0(const U0Spec& spec, const Nonlinearity& nl, const std::vector<double>& x2) {
  std::vector<double> out(x2.size());
  switch (spec.kind) {
    case U0Kind::constant:
      std::fill(out.begin(), out.end(), spec.params[0]);
      break;
    case U0Kind::bump: {
      const double c = spec.params[0], w = spec.params[1], a = spec.params[2];
      for (std::size_t j = 0; j < x2.size(); ++j) {
        const double s = (x2[j] - c) / w;
        out[j] = std::abs(s) < 1.0 ? a * std::exp(1.0 - 1.0 / (1.0 - s * s)) : 0.0;
      }
      break;
    }
    case U0Kind::profile: {
      const double top = x2.empty() ? 1.0 : std::max(x2.back(), 1.0);
      const Profile1D p = compute_profile(nl, spec.params[0], top, std::max(64, static_cast<int>(std::ceil(16 * top))));
      for (std::size_t j = 0; j < x2.size(); ++j) out[j] = std::max(0.0, p.value_at(x2[j]));
      break;
    }
    case U0Kind::table: {
      const auto rows = read_table(spec.path);
      for (std::size_t j = 0; j < x2.size(); ++j) out[j] = interpolate(rows, x2[j]);
      break;
    }
  }
  return out;
}

std::optional<double> parse_far(const std::string& spec) {
  if (spec == "neumann") return std::nullopt;
  const std::string prefix = "dirichlet:";
  if (spec.rfind(prefix, 0) == 0) {
    const double c = to_number(trim(spec.substr(prefix.size())), fmt::format("far boundary '{}'", spec));
    if (c < 0.0) throw InputError(fmt::format("far boundary '{}': value must be nonnegative", spec));
    return c;
  }
  throw InputError(fmt::format("far boundary '{}' must be 'neumann' or 'dirichlet:<value>'", spec));
}

BoundarySpec make_boundary(const std::string& kind, const Grid2D& grid, const U0Spec& u0, const Nonlinearity& nl,
                           const std::string& right, const std::string& top) {
  const bool quarter = kind == "quarter";
  if (!quarter && kind != "half") throw InputError(fmt::format("unknown problem kind '{}'", kind));
  const int ny = quarter ? grid.n2 + 1 : grid.n2;
  std::vector<double> x2(ny);
  for (int j = 0; j < ny; ++j) x2[j] = j * grid.h;
  BoundarySpec bc = quarter ? BoundarySpec::quarter(sample_u0(u0, nl, x2)) : BoundarySpec::half(sample_u0(u0, nl, x2));
  if (const auto r = parse_far(right)) {
    bc.right = FarKind::dirichlet;
    bc.right_trace.assign(ny, *r);
  }
  if (const auto t = parse_far(top)) {
    if (!quarter) throw InputError("a top boundary only exists for quarter problems");
    bc.top = FarKind::dirichlet;
    bc.top_trace.assign(grid.n1 + 1, *t);
  }
  return bc;
}

}  // namespace ellab::cli
