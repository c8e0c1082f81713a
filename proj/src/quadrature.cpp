#include "naheat/quadrature.hpp"

#include <gsl/gsl_errno.h>
#include <gsl/gsl_integration.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <memory>
#include <mutex>

namespace naheat::quad {

namespace {

// GSL aborts by default; every call site here inspects status codes instead.
const bool kGslHandlerOff = [] {
  gsl_set_error_handler_off();
  return true;
}();

struct WorkspaceDeleter {
  void operator()(gsl_integration_workspace* w) const { gsl_integration_workspace_free(w); }
};

double trampoline(double x, void* params) {
  return (*static_cast<const std::function<double(double)>*>(params))(x);
}

}  // namespace

const GaussRule& gauss_legendre(int order) {
  if (order < 1) throw std::invalid_argument("gauss_legendre: order must be positive");
  static std::mutex mutex;
  static std::map<int, std::unique_ptr<GaussRule>> cache;
  std::lock_guard lock(mutex);
  auto it = cache.find(order);
  if (it != cache.end()) return *it->second;

  auto rule = std::make_unique<GaussRule>();
  gsl_integration_glfixed_table* table =
      gsl_integration_glfixed_table_alloc(static_cast<std::size_t>(order));
  rule->nodes.resize(order);
  rule->weights.resize(order);
  for (int i = 0; i < order; ++i)
    gsl_integration_glfixed_point(-1.0, 1.0, static_cast<std::size_t>(i), &rule->nodes[i],
                                  &rule->weights[i], table);
  gsl_integration_glfixed_table_free(table);
  auto [pos, _] = cache.emplace(order, std::move(rule));
  return *pos->second;
}

NodeSet composite_nodes(std::span<const double> breaks, int order) {
  const GaussRule& rule = gauss_legendre(order);
  NodeSet out;
  if (breaks.size() < 2) return out;
  out.x.reserve((breaks.size() - 1) * rule.nodes.size());
  out.w.reserve(out.x.capacity());
  for (std::size_t p = 0; p + 1 < breaks.size(); ++p) {
    const double mid = 0.5 * (breaks[p] + breaks[p + 1]);
    const double half = 0.5 * (breaks[p + 1] - breaks[p]);
    for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
      out.x.push_back(mid + half * rule.nodes[i]);
      out.w.push_back(half * rule.weights[i]);
    }
  }
  return out;
}

NodeSet composite_nodes(double a, double b, int panels, int order) {
  std::vector<double> breaks(static_cast<std::size_t>(panels) + 1);
  for (int p = 0; p <= panels; ++p) breaks[p] = a + (b - a) * p / panels;
  breaks.back() = b;
  return composite_nodes(breaks, order);
}

QuadResult adaptive(const std::function<double(double)>& f, double a, double b,
                    double rel_tol, double abs_tol, int max_intervals,
                    bool throw_on_budget) {
  (void)kGslHandlerOff;
  if (a == b) return {};
  std::unique_ptr<gsl_integration_workspace, WorkspaceDeleter> ws(
      gsl_integration_workspace_alloc(static_cast<std::size_t>(max_intervals)));
  gsl_function gf{&trampoline, const_cast<std::function<double(double)>*>(&f)};
  const double eps_rel = std::max(rel_tol, 60.0 * std::numeric_limits<double>::epsilon());
  double value = 0.0;
  double err = 0.0;
  const int status = gsl_integration_qag(&gf, a, b, abs_tol, eps_rel,
                                         static_cast<std::size_t>(max_intervals),
                                         GSL_INTEG_GAUSS21, ws.get(), &value, &err);
  QuadResult res{value, err};
  if (status != GSL_SUCCESS && status != GSL_EROUND && throw_on_budget)
    throw QuadratureError(std::string("adaptive quadrature: ") + gsl_strerror(status), res);
  return res;
}

QuadResult adaptive_panels(const std::function<double(double)>& f,
                           std::span<const double> breaks, double rel_tol) {
  QuadResult total;
  double scale = 0.0;
  for (std::size_t p = 0; p + 1 < breaks.size(); ++p) {
    const double abs_tol = rel_tol * scale * 1e-3;
    QuadResult r = adaptive(f, breaks[p], breaks[p + 1], rel_tol, abs_tol);
    total.value += r.value;
    total.abs_error += r.abs_error;
    scale = std::max(scale, std::abs(r.value));
  }
  return total;
}

std::vector<double> panel_breaks(double a, double b, double width) {
  std::vector<double> out;
  if (!(b > a)) return {a, b};
  const auto n = static_cast<std::size_t>(std::ceil((b - a) / width - 1e-12));
  out.reserve(n + 1);
  for (std::size_t i = 0; i < n; ++i) out.push_back(a + width * static_cast<double>(i));
  out.push_back(b);
  return out;
}

double find_cutoff(const std::function<double(double)>& log_envelope, double start,
                   double drop, double step, int max_steps) {
  double best = -std::numeric_limits<double>::infinity();
  double x = start;
  for (int i = 0; i < max_steps; ++i, x += step) {
    const double v = log_envelope(x);
    if (v > best) best = v;
    if (std::isfinite(best) && v < best - drop) return x;
    if (v == -std::numeric_limits<double>::infinity() && i > 0) return x;
  }
  return x;
}

}  // namespace naheat::quad
