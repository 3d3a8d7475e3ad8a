#include "ellab/nonlinearity.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>

#include <fmt/format.h>

#include "ellab/error.hpp"
#include "ellab/quadrature.hpp"

namespace ellab {

namespace detail {

struct Kernel {
  virtual ~Kernel() = default;
  virtual double value(double s) const = 0;
  // Right derivative; kinds with kinks override with their one-sided slope.
  virtual double slope(double s) const {
    const double d = 1e-7 * std::max(1.0, std::abs(s));
    return (value(s + d) - value(s)) / d;
  }
  virtual std::optional<double> closed_F(double /*z*/) const { return std::nullopt; }
  virtual void kinks(double /*a*/, double /*b*/, std::vector<double>& /*out*/) const {}
  virtual std::string name() const = 0;
  virtual NonlinearityKind kind() const = 0;
  virtual std::vector<double> parameters() const { return {}; }
};

namespace {

struct Logistic final : Kernel {
  double value(double s) const override { return s * (1.0 - s); }
  double slope(double s) const override { return 1.0 - 2.0 * s; }
  std::optional<double> closed_F(double z) const override { return z * z / 2.0 - z * z * z / 3.0; }
  std::string name() const override { return "logistic"; }
  NonlinearityKind kind() const override { return NonlinearityKind::logistic; }
};

struct AbsSin final : Kernel {
  double value(double s) const override { return std::abs(std::sin(s)); }
  double slope(double s) const override {
    const double sn = std::sin(s);
    // At kpi the right slope is +1 whichever arch we are on.
    if (sn == 0.0 || std::abs(s - std::round(s / std::numbers::pi) * std::numbers::pi) < 1e-15)
      return 1.0;
    return sn > 0.0 ? std::cos(s) : -std::cos(s);
  }
  std::optional<double> closed_F(double z) const override {
    if (z < 0.0) return -*closed_F(-z);
    const double k = std::floor(z / std::numbers::pi);
    const double r = z - k * std::numbers::pi;
    return 2.0 * k + (1.0 - std::cos(r));
  }
  void kinks(double a, double b, std::vector<double>& out) const override {
    for (double k = std::ceil(a / std::numbers::pi); k * std::numbers::pi < b; k += 1.0)
      if (k * std::numbers::pi > a) out.push_back(k * std::numbers::pi);
  }
  std::string name() const override { return "abs-sin"; }
  NonlinearityKind kind() const override { return NonlinearityKind::abs_sin; }
};

struct LinearDecay final : Kernel {
  double value(double s) const override { return 1.0 - s; }
  double slope(double) const override { return -1.0; }
  std::optional<double> closed_F(double z) const override { return z - z * z / 2.0; }
  std::string name() const override { return "linear-decay"; }
  NonlinearityKind kind() const override { return NonlinearityKind::linear_decay; }
};

struct Constant final : Kernel {
  explicit Constant(double c) : c(c) {}
  double value(double) const override { return c; }
  double slope(double) const override { return 0.0; }
  std::optional<double> closed_F(double z) const override { return c * z; }
  std::string name() const override { return fmt::format("constant:{}", c); }
  NonlinearityKind kind() const override { return NonlinearityKind::constant; }
  std::vector<double> parameters() const override { return {c}; }
  double c;
};

// Distance to the level-`level` pre-fractal of the middle-thirds Cantor set.
double cantor_distance(double s, int level) {
  if (s <= 0.0) return -s;
  if (s >= 1.0) return s - 1.0;
  double scale = 1.0;
  for (int k = 0; k < level; ++k) {
    if (s <= 1.0 / 3.0) {
      s *= 3.0;
    } else if (s >= 2.0 / 3.0) {
      s = 3.0 * s - 2.0;
    } else {
      return scale * std::min(s - 1.0 / 3.0, 2.0 / 3.0 - s);
    }
    scale /= 3.0;
  }
  return 0.0;
}

void cantor_kinks(double lo, double width, int depth, std::vector<double>& out) {
  if (depth == 0) {
    out.push_back(lo);
    out.push_back(lo + width);
    return;
  }
  const double third = width / 3.0;
  cantor_kinks(lo, third, depth - 1, out);
  out.push_back(lo + 1.5 * third);  // gap midpoint
  cantor_kinks(lo + 2.0 * third, third, depth - 1, out);
}

struct Cantor final : Kernel {
  explicit Cantor(int level) : level(level) {
    cantor_kinks(0.0, 1.0, level, all_kinks);
    std::sort(all_kinks.begin(), all_kinks.end());
    all_kinks.erase(std::unique(all_kinks.begin(), all_kinks.end()), all_kinks.end());
  }
  double value(double s) const override { return cantor_distance(s, level); }
  double slope(double s) const override {
    const double d = 1e-9;
    return (value(s + d) - value(s)) / d;
  }
  void kinks(double a, double b, std::vector<double>& out) const override {
    for (double k : all_kinks)
      if (k > a && k < b) out.push_back(k);
  }
  std::string name() const override { return fmt::format("cantor:{}", level); }
  NonlinearityKind kind() const override { return NonlinearityKind::cantor; }
  std::vector<double> parameters() const override { return {static_cast<double>(level)}; }
  int level;
  std::vector<double> all_kinks;
};

struct Table final : Kernel {
  Table(std::vector<double> s, std::vector<double> f, std::string source)
      : s(std::move(s)), f(std::move(f)), source(std::move(source)) {}
  std::size_t segment(double x) const {
    const auto it = std::upper_bound(s.begin(), s.end(), x);
    const std::size_t k = static_cast<std::size_t>(it - s.begin());
    return std::clamp<std::size_t>(k, 1, s.size() - 1) - 1;
  }
  double value(double x) const override {
    if (x <= s.front()) return f.front();
    if (x >= s.back()) return f.back();
    const std::size_t k = segment(x);
    const double t = (x - s[k]) / (s[k + 1] - s[k]);
    return f[k] + t * (f[k + 1] - f[k]);
  }
  double slope(double x) const override {
    if (x < s.front() || x >= s.back()) return 0.0;
    const std::size_t k = segment(x);
    return (f[k + 1] - f[k]) / (s[k + 1] - s[k]);
  }
  void kinks(double a, double b, std::vector<double>& out) const override {
    for (double x : s)
      if (x > a && x < b) out.push_back(x);
  }
  std::string name() const override { return "table:" + source; }
  NonlinearityKind kind() const override { return NonlinearityKind::table; }
  std::vector<double> s, f;
  std::string source;
};

struct Reflected final : Kernel {
  Reflected(Nonlinearity base, double M_prime, double m)
      : base(std::move(base)), shift(M_prime + 1.0), m(m), M_prime(M_prime) {}
  double split() const { return shift - m; }
  double value(double s) const override {
    return s <= split() ? -base(shift - s) : -base(m);
  }
  double slope(double s) const override {
    if (s >= split()) return 0.0;
    // Right derivative of g is minus the left derivative of f at shift - s.
    const double x = shift - s;
    const double d = 1e-7 * std::max(1.0, std::abs(x));
    return (base(x) - base(x - d)) / d;
  }
  std::optional<double> closed_F(double z) const override {
    const double c = split();
    if (z <= c) return base.F(shift - z) - base.F(shift);
    return base.F(m) - base.F(shift) - base(m) * (z - c);
  }
  void kinks(double a, double b, std::vector<double>& out) const override {
    for (double k : base.breakpoints(shift - b, shift - a)) out.push_back(shift - k);
    if (split() > a && split() < b) out.push_back(split());
  }
  std::string name() const override {
    return fmt::format("reflect({};M'={},m={})", base.name(), M_prime, m);
  }
  NonlinearityKind kind() const override { return NonlinearityKind::reflected; }
  std::vector<double> parameters() const override { return {M_prime, m}; }
  Nonlinearity base;
  double shift, m, M_prime;
};

}  // namespace
}  // namespace detail

Nonlinearity::Nonlinearity(std::shared_ptr<const detail::Kernel> kernel, double s_max)
    : kernel_(std::move(kernel)), s_max_(s_max) {
  if (!(s_max > 0.0) || !std::isfinite(s_max))
    throw InputError(fmt::format("s_max must be positive and finite, got {}", s_max));
  name_ = kernel_->name();
  build_cache();
}

void Nonlinearity::build_cache() {
  constexpr int n = 10000;
  const double ds = s_max_ / (n - 1);
  double lip = 0.0;
  double prev = (*this)(0.0);
  double cur = (*this)(ds);
  lip = std::abs(cur - prev) / ds;
  for (int i = 1; i < n - 1; ++i) {
    const double next = (*this)((i + 1) * ds);
    lip = std::max(lip, std::abs(next - prev) / (2.0 * ds));
    prev = cur;
    cur = next;
  }
  lip = std::max(lip, std::abs(cur - prev) / ds);
  lipschitz_ = 1.1 * lip;

  if (kernel_->closed_F(0.0)) return;
  // Knots at every kink plus a uniform backbone; cumulative integrals between
  // consecutive knots come from adaptive quadrature.
  std::vector<double> knots = breakpoints(0.0, s_max_);
  for (int k = 0; k <= 64; ++k) knots.push_back(s_max_ * k / 64.0);
  std::sort(knots.begin(), knots.end());
  knots.erase(std::unique(knots.begin(), knots.end()), knots.end());
  auto table = std::make_shared<std::vector<std::pair<double, double>>>();
  table->reserve(knots.size());
  double acc = 0.0;
  table->emplace_back(knots.front(), 0.0);
  const auto fn = [this](double s) { return (*this)(s); };
  for (std::size_t k = 1; k < knots.size(); ++k) {
    acc += ellab::integrate(fn, knots[k - 1], knots[k]).value;
    table->emplace_back(knots[k], acc);
  }
  cumulative_ = std::move(table);
}

Nonlinearity Nonlinearity::logistic(double s_max) {
  return {std::make_shared<detail::Logistic>(), s_max};
}
Nonlinearity Nonlinearity::abs_sin(double s_max) {
  return {std::make_shared<detail::AbsSin>(), s_max};
}
Nonlinearity Nonlinearity::linear_decay(double s_max) {
  return {std::make_shared<detail::LinearDecay>(), s_max};
}
Nonlinearity Nonlinearity::constant(double c, double s_max) {
  return {std::make_shared<detail::Constant>(c), s_max};
}
Nonlinearity Nonlinearity::cantor(int level, double s_max) {
  if (level < 1 || level > 20) throw InputError(fmt::format("cantor level {} outside [1, 20]", level));
  return {std::make_shared<detail::Cantor>(level), s_max};
}

Nonlinearity Nonlinearity::table(std::vector<double> s, std::vector<double> f, std::string source) {
  if (s.size() < 2 || s.size() != f.size())
    throw InputError("table nonlinearity needs at least two (s, f) rows");
  for (std::size_t k = 0; k < s.size(); ++k) {
    if (!std::isfinite(s[k]) || !std::isfinite(f[k]))
      throw InputError(fmt::format("table row {} is not finite", k + 1));
    if (k > 0 && !(s[k] > s[k - 1]))
      throw InputError(fmt::format("table abscissae must increase strictly (row {})", k + 1));
  }
  if (s.front() > 0.0) throw InputError("table must start at s <= 0");
  const double s_max = s.back();
  return {std::make_shared<detail::Table>(std::move(s), std::move(f), std::move(source)), s_max};
}

Nonlinearity Nonlinearity::table_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError(fmt::format("cannot open nonlinearity table '{}'", path));
  std::string line;
  if (!std::getline(in, line)) throw InputError(fmt::format("{}: empty table", path));
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != "s,f") throw InputError(fmt::format("{}:1: expected header 's,f'", path));
  std::vector<double> s, f;
  int lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto comma = line.find(',');
    if (comma == std::string::npos)
      throw InputError(fmt::format("{}:{}: expected two comma-separated values", path, lineno));
    try {
      std::size_t used = 0;
      const std::string a = line.substr(0, comma), b = line.substr(comma + 1);
      s.push_back(std::stod(a, &used));
      if (used != a.size()) throw std::invalid_argument(a);
      f.push_back(std::stod(b, &used));
      if (used != b.size()) throw std::invalid_argument(b);
    } catch (const std::logic_error&) {
      throw InputError(fmt::format("{}:{}: malformed number", path, lineno));
    }
  }
  return table(std::move(s), std::move(f), path);
}

Nonlinearity Nonlinearity::parse(std::string_view spec, std::optional<double> s_max) {
  const auto colon = spec.find(':');
  const std::string_view head = spec.substr(0, colon);
  const std::string_view arg = colon == std::string_view::npos ? "" : spec.substr(colon + 1);
  auto need_no_arg = [&] {
    if (colon != std::string_view::npos)
      throw InputError(fmt::format("nonlinearity '{}' takes no argument", head));
  };
  auto number = [&](std::string_view text) {
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
    if (ec != std::errc{} || ptr != text.data() + text.size())
      throw InputError(fmt::format("bad numeric argument '{}' in nonlinearity '{}'", text, spec));
    return v;
  };
  if (head == "logistic") {
    need_no_arg();
    return logistic(s_max.value_or(2.0));
  }
  if (head == "abs-sin") {
    need_no_arg();
    return abs_sin(s_max.value_or(10.0));
  }
  if (head == "linear-decay") {
    need_no_arg();
    return linear_decay(s_max.value_or(4.0));
  }
  if (head == "constant") return constant(number(arg), s_max.value_or(4.0));
  if (head == "cantor") {
    const double level = number(arg);
    if (level != std::floor(level)) throw InputError("cantor level must be an integer");
    return cantor(static_cast<int>(level), s_max.value_or(1.0));
  }
  if (head == "table") {
    if (arg.empty()) throw InputError("table nonlinearity needs a path");
    auto t = table_csv(std::string(arg));
    return s_max ? t.with_s_max(*s_max) : t;
  }
  throw InputError(fmt::format("unknown nonlinearity '{}'", spec));
}

Nonlinearity Nonlinearity::with_s_max(double s_max) const {
  Nonlinearity copy(kernel_, s_max);
  return copy;
}

double Nonlinearity::operator()(double s) const { return kernel_->value(s); }
double Nonlinearity::derivative(double s) const { return kernel_->slope(s); }

double Nonlinearity::eval(double s) const {
  if (!(s >= 0.0 && s <= s_max_))
    throw InputError(fmt::format("{}: s = {} outside [0, {}]", name_, s, s_max_));
  return (*this)(s);
}

double Nonlinearity::antiderivative(double z) const {
  if (!(z >= 0.0 && z <= s_max_))
    throw InputError(fmt::format("{}: z = {} outside [0, {}]", name_, z, s_max_));
  return F(z);
}

double Nonlinearity::F(double z) const {
  if (auto closed = kernel_->closed_F(z)) return *closed;
  const auto& knots = *cumulative_;
  if (z <= knots.front().first) return -integral(z, knots.front().first);
  auto it = std::upper_bound(knots.begin(), knots.end(), z,
                             [](double v, const auto& knot) { return v < knot.first; });
  const auto& [x0, acc] = *(it - 1);
  return acc + integral(x0, z);
}

double Nonlinearity::integral(double a, double b) const {
  if (a == b) return 0.0;
  const auto cuts = breakpoints(std::min(a, b), std::max(a, b));
  return ellab::integrate([this](double s) { return (*this)(s); }, a, b, cuts).value;
}

std::vector<double> Nonlinearity::breakpoints(double a, double b) const {
  std::vector<double> out;
  kernel_->kinks(a, b, out);
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

bool Nonlinearity::has_closed_form_F() const { return kernel_->closed_F(0.0).has_value(); }
NonlinearityKind Nonlinearity::kind() const { return kernel_->kind(); }
std::vector<double> Nonlinearity::parameters() const { return kernel_->parameters(); }

double eval_f(const Nonlinearity& nl, double s) { return nl.eval(s); }
double antiderivative_F(const Nonlinearity& nl, double z) { return nl.antiderivative(z); }

Nonlinearity reflect(const Nonlinearity& nl, double M_prime, double m) {
  if (!(m <= M_prime)) throw InputError(fmt::format("reflect needs m <= M' (m={}, M'={})", m, M_prime));
  if (m < 0.0) throw InputError("reflect needs m >= 0");
  auto kernel = std::make_shared<detail::Reflected>(nl, M_prime, m);
  return Nonlinearity(std::move(kernel), M_prime + 1.0);
}

const char* to_string(Verdict v) {
  switch (v) {
    case Verdict::holds: return "holds";
    case Verdict::fails: return "fails";
    case Verdict::indeterminate: return "indeterminate";
  }
  return "?";
}

const char* to_string(NonlinearityKind k) {
  switch (k) {
    case NonlinearityKind::logistic: return "logistic";
    case NonlinearityKind::abs_sin: return "abs-sin";
    case NonlinearityKind::linear_decay: return "linear-decay";
    case NonlinearityKind::constant: return "constant";
    case NonlinearityKind::cantor: return "cantor";
    case NonlinearityKind::table: return "table";
    case NonlinearityKind::reflected: return "reflected";
  }
  return "?";
}

}  // namespace ellab
