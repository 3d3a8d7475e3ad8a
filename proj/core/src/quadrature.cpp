#include "ellab/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <fmt/format.h>

#include "ellab/error.hpp"

namespace ellab {

QuadratureResult integrate(const std::function<double(double)>& fn, double a, double b,
                           std::span<const double> breakpoints, double abs_tol, double rel_tol) {
  if (!(std::isfinite(a) && std::isfinite(b)))
    throw InputError("integrate: non-finite bounds");
  if (a == b) return {};
  const double sign = a < b ? 1.0 : -1.0;
  const double lo = std::min(a, b);
  const double hi = std::max(a, b);

  std::vector<double> cuts{lo};
  for (double p : breakpoints)
    if (p > lo && p < hi) cuts.push_back(p);
  cuts.push_back(hi);
  std::sort(cuts.begin(), cuts.end());
  cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());

  struct Panel {
    double a, b, value, error, l1;
  };
  auto evaluate = [&fn](double pa, double pb) {
    Panel p{pa, pb, 0.0, 0.0, 0.0};
    p.value = boost::math::quadrature::gauss_kronrod<double, 21>::integrate(fn, pa, pb, 0, 0.0, &p.error, &p.l1);
    // The single-panel estimate comes back in units of the reference interval
    // [-1, 1]; rescale to [pa, pb].
    p.error *= 0.5 * (pb - pa);
    return p;
  };
  // Globally adaptive: always bisect the panel with the largest error estimate.
  auto by_error = [](const Panel& x, const Panel& y) { return x.error < y.error; };
  std::vector<Panel> heap;
  double err_sum = 0.0;
  double l1_sum = 0.0;
  for (std::size_t k = 0; k + 1 < cuts.size(); ++k) {
    heap.push_back(evaluate(cuts[k], cuts[k + 1]));
    err_sum += heap.back().error;
    l1_sum += heap.back().l1;
  }
  std::make_heap(heap.begin(), heap.end(), by_error);
  constexpr std::size_t kMaxPanels = 2000;
  const auto target = [&](double l1) {
    return std::max(abs_tol, rel_tol * l1) + 8.0 * std::numeric_limits<double>::epsilon() * l1;
  };
  while (err_sum > target(l1_sum) && heap.size() < kMaxPanels) {
    std::pop_heap(heap.begin(), heap.end(), by_error);
    const Panel worst = heap.back();
    const double mid = 0.5 * (worst.a + worst.b);
    if (mid <= worst.a || mid >= worst.b) {
      heap.push_back(worst);
      std::push_heap(heap.begin(), heap.end(), by_error);
      break;
    }
    heap.pop_back();
    const Panel left = evaluate(worst.a, mid);
    const Panel right = evaluate(mid, worst.b);
    err_sum += left.error + right.error - worst.error;
    l1_sum += left.l1 + right.l1 - worst.l1;
    for (const Panel& p : {left, right}) {
      heap.push_back(p);
      std::push_heap(heap.begin(), heap.end(), by_error);
    }
  }
  // Sum in position order so the result does not depend on heap layout.
  std::sort(heap.begin(), heap.end(), [](const Panel& x, const Panel& y) { return x.a < y.a; });
  QuadratureResult total;
  double l1_total = 0.0;
  for (const Panel& p : heap) {
    total.value += p.value;
    total.error += p.error;
    l1_total += p.l1;
  }
  const double allowance =
      std::max(abs_tol, rel_tol * l1_total) + 64.0 * std::numeric_limits<double>::epsilon() * l1_total;
  if (!(total.error <= allowance) || !std::isfinite(total.value))
    throw NumericError(fmt::format("quadrature on [{}, {}] reached error {:.3e} > {:.3e}", lo, hi,
                                   total.error, allowance),
                       total.error);
  total.value *= sign;
  return total;
}

}  // namespace ellab
