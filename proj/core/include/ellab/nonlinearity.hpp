#pragma once

#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace ellab {

namespace detail {
struct Kernel;
}

enum class NonlinearityKind { logistic, abs_sin, linear_decay, constant, cantor, table, reflected };

// Reaction term f on R_+ together with its analysis metadata.
//
// Immutable value type: copies share the underlying kernel. operator() and
// F() are defined on the whole real line (each kind has a natural
// extension), while the checked eval()/antiderivative() enforce
// 0 <= s <= s_max.
class Nonlinearity {
 public:
  static Nonlinearity logistic(double s_max = 2.0);
  static Nonlinearity abs_sin(double s_max = 10.0);
  static Nonlinearity linear_decay(double s_max = 4.0);
  static Nonlinearity constant(double c, double s_max = 4.0);
  // dist(s, C_level), C_level the level-th ternary Cantor pre-fractal.
  static Nonlinearity cantor(int level, double s_max = 1.0);
  // Piecewise-linear interpolation of (s, f) nodes; constant beyond the ends.
  static Nonlinearity table(std::vector<double> s, std::vector<double> f,
                            std::string source = "inline");
  static Nonlinearity table_csv(const std::string& path);
  // Parses `logistic`, `abs-sin`, `linear-decay`, `constant:<c>`,
  // `cantor:<level>` or `table:<path>`.
  static Nonlinearity parse(std::string_view spec, std::optional<double> s_max = std::nullopt);

  Nonlinearity with_s_max(double s_max) const;

  double operator()(double s) const;
  double derivative(double s) const;
  double eval(double s) const;
  double antiderivative(double z) const;

  // Unchecked F(z) = int_0^z f.
  double F(double z) const;
  // int_a^b f evaluated directly on [a, b]; no cancellation for short spans.
  double integral(double a, double b) const;
  // Kinks of f strictly inside (a, b), ascending.
  std::vector<double> breakpoints(double a, double b) const;
  bool has_closed_form_F() const;

  NonlinearityKind kind() const;
  std::vector<double> parameters() const;
  const std::string& name() const { return name_; }
  double s_max() const { return s_max_; }
  double lipschitz_estimate() const { return lipschitz_; }

 private:
  Nonlinearity(std::shared_ptr<const detail::Kernel> kernel, double s_max);
  void build_cache();

  std::shared_ptr<const detail::Kernel> kernel_;
  std::string name_;
  double s_max_ = 0.0;
  double lipschitz_ = 0.0;
  // Cumulative integral at knots, used when no closed form exists.
  std::shared_ptr<const std::vector<std::pair<double, double>>> cumulative_;

  friend Nonlinearity reflect(const Nonlinearity& nl, double M_prime, double m);
};

struct ZeroSet {
  std::vector<double> points;
  std::vector<std::pair<double, double>> intervals;
  double tol_f = 1e-10;
  // Only populated by compute_Zf: candidates whose strict-increase margin is
  // within tol_F of zero, and whether 0 was admitted by the vacuous rule.
  std::vector<double> borderline;
  bool origin_by_convention = false;

  bool empty() const { return points.empty() && intervals.empty(); }
  // Every element as a sorted list of reals; intervals contribute both ends.
  std::vector<double> representatives() const;
  // Distance from s to the nearest element.
  double distance(double s) const;
};

enum class Verdict { holds, fails, indeterminate };

struct RatioEstimate {
  double z = 0.0;
  double min_ratio = 0.0;
  double max_ratio = 0.0;
  Verdict verdict = Verdict::indeterminate;
};

struct HypothesisReport {
  Verdict h1 = Verdict::fails;
  double mu = 0.0;
  double mu_prime = 0.0;
  std::optional<RatioEstimate> origin_ratio;  // liminf f(s)/s at 0 when f(0)=0
  Verdict h2 = Verdict::fails;
  std::vector<RatioEstimate> h2_ratios;  // right quotients at each zero
  Verdict h3 = Verdict::fails;
  std::vector<RatioEstimate> h3_ratios;  // left quotients at zeros above mu
};

struct HypothesisOptions {
  int grid_n = 20001;
  double tol_f = 1e-10;
  double ratio_tol = 1e-6;
};

double eval_f(const Nonlinearity& nl, double s);
double antiderivative_F(const Nonlinearity& nl, double z);
ZeroSet zero_set(const Nonlinearity& nl, double tol_f = 1e-10, int grid_n = 20001);
ZeroSet compute_Zf(const Nonlinearity& nl, double tol_f = 1e-10, double tol_F = 1e-12,
                   int grid_n = 20001);
HypothesisReport check_hypotheses(const Nonlinearity& nl, const HypothesisOptions& opt = {});
// g(s) = -f(M'+1-s) on [0, M'+1-m], constant -f(m) beyond.
Nonlinearity reflect(const Nonlinearity& nl, double M_prime, double m);

const char* to_string(Verdict v);
const char* to_string(NonlinearityKind k);

}  // namespace ellab
