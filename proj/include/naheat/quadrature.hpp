#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace naheat::quad {

struct QuadResult {
  double value = 0.0;
  double abs_error = 0.0;
};

// Raised when an adaptive rule exhausts its subdivision budget without
// meeting the requested tolerance.
class QuadratureError : public std::runtime_error {
 public:
  QuadratureError(const std::string& what, QuadResult partial)
      : std::runtime_error(what), partial_(partial) {}
  QuadResult partial() const { return partial_; }

 private:
  QuadResult partial_;
};

// Gauss-Legendre nodes and weights on [-1, 1]. Rules are cached per order
// and the returned reference stays valid for the life of the process.
struct GaussRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};
const GaussRule& gauss_legendre(int order);

// Fixed composite Gauss-Legendre: `panels` equal panels of `order` nodes.
template <class F>
double composite_gauss(F&& f, double a, double b, int panels, int order) {
  const GaussRule& rule = gauss_legendre(order);
  const double width = (b - a) / panels;
  double sum = 0.0;
  for (int p = 0; p < panels; ++p) {
    const double mid = a + (p + 0.5) * width;
    const double half = 0.5 * width;
    double panel = 0.0;
    for (std::size_t i = 0; i < rule.nodes.size(); ++i)
      panel += rule.weights[i] * f(mid + half * rule.nodes[i]);
    sum += half * panel;
  }
  return sum;
}

// Node/weight pairs of a composite rule, materialised for reuse.
struct NodeSet {
  std::vector<double> x;
  std::vector<double> w;
  std::size_t size() const { return x.size(); }
};
NodeSet composite_nodes(std::span<const double> breaks, int order);
NodeSet composite_nodes(double a, double b, int panels, int order);

// Global adaptive Gauss-Kronrod (21-point) on [a, b].
// Stops when the error estimate is below max(abs_tol, rel_tol * |value|).
// Throws QuadratureError when `throw_on_budget` and the budget runs out.
QuadResult adaptive(const std::function<double(double)>& f, double a, double b,
                    double rel_tol, double abs_tol = 0.0, int max_intervals = 2000,
                    bool throw_on_budget = false);

// Adaptive integration panel by panel over consecutive breakpoints. Each panel
// receives the same relative tolerance; the absolute tolerance is shared
// against the running L1 scale so that tiny tail panels do not stall.
QuadResult adaptive_panels(const std::function<double(double)>& f,
                           std::span<const double> breaks, double rel_tol);

// Breakpoints a = b0 < b1 < ... < bn = b with spacing at most `width`,
// aligned to multiples of `width` measured from `a`.
std::vector<double> panel_breaks(double a, double b, double width);

// Smallest x >= start (searched in steps of `step`, at most `max_steps`) at
// which `log_envelope(x)` has fallen `drop` below its running maximum and keeps
// decreasing. Used to pick truncation points for exponentially decaying tails.
double find_cutoff(const std::function<double(double)>& log_envelope, double start,
                   double drop, double step, int max_steps = 100000);

}  // namespace naheat::quad
