#include "naheat/estimator.hpp"

#include "naheat/heat_kernel.hpp"
#include "naheat/quadrature.hpp"

#include <gsl/gsl_fit.h>

#include <algorithm>
#include <cmath>
#include <limits>

namespace naheat {

namespace {

std::pair<double, double> loglog_fit(const std::vector<double>& t, const std::vector<double>& v) {
  std::vector<double> x(t.size()), y(t.size());
  for (std::size_t i = 0; i < t.size(); ++i) {
    x[i] = std::log(t[i]);
    y[i] = std::log(v[i]);
  }
  double c0 = 0, c1 = 0, cov00 = 0, cov01 = 0, cov11 = 0, ss = 0;
  gsl_fit_linear(x.data(), 1, y.data(), 1, x.size(), &c0, &c1, &cov00, &cov01, &cov11, &ss);
  return {c1, std::exp(c0)};
}

double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

}  // namespace

IntegralResult weighted_l1_result(const KernelField& f, double epsilon, double t) {
  if (!(epsilon >= 0)) throw InvalidArgument("epsilon must be nonnegative");
  if (!(t > 0)) throw InvalidArgument("t must be positive");
  const double rate = epsilon / std::sqrt(t);
  if (rate > 0.5)
    throw InvalidArgument("epsilon / sqrt(t) = " + std::to_string(rate) + " exceeds 1/2");
  IntegrateOptions opt;
  opt.reduce = Reduce::absolute;
  opt.weight_rate = rate;
  if (rate > 0) opt.radial_weight = [rate](double r) { return std::exp(rate * r); };
  return integrate(f, opt);
}

double weighted_l1(const KernelField& f, double epsilon, double t) {
  return weighted_l1_result(f, epsilon, t).value;
}

std::pair<double, double> decay_fit(const std::vector<std::pair<double, double>>& points) {
  if (points.size() < 4) throw InvalidArgument("decay_fit: need at least 4 points");
  std::vector<double> t, v;
  for (const auto& [a, b] : points) {
    if (!(a > 0) || !(b > 0)) throw InvalidArgument("decay_fit: t and norms must be positive");
    t.push_back(a);
    v.push_back(b);
  }
  const auto [lo, hi] = std::minmax_element(t.begin(), t.end());
  if (*lo == *hi) throw InvalidArgument("decay_fit: all t equal");
  return loglog_fit(t, v);
}

double inner_integral(double alpha, double beta, double theta, double delta) {
  if (!(alpha >= 0) || !(beta >= alpha)) throw InvalidArgument("inner_integral: need beta >= alpha >= 0");
  if (!(delta >= 0 && delta <= 0.5)) throw InvalidArgument("inner_integral: delta must lie in [0, 1/2]");
  if (!(theta >= 0)) throw InvalidArgument("inner_integral: theta must be nonnegative");
  const double ct = std::cosh(theta);
  auto over_u = [&](double u) {
    const double cu = std::cosh(u);
    const double A = ct + cu;
    const double cd = std::pow(cu, delta);
    // xi = A e^s
    auto over_s = [&](double s) {
      const double xi = A * std::exp(s);
      return xi * std::pow(xi, -2.0 - beta) * (std::pow(xi, delta) + cd) * std::exp(-std::exp(-s));
    };
    const double smax = 40.0 / (1.0 + beta - delta) + 10.0;
    const auto br = quad::panel_breaks(-4.5, smax, 2.0);
    return std::cosh(alpha * u) * quad::adaptive_panels(over_s, br, 1e-12).value;
  };
  const double rate = 1.0 + beta - alpha - delta;
  const double U = std::min(700.0, 45.0 / rate + theta + 10.0);
  const auto br = quad::panel_breaks(0.0, U, 1.0);
  return 2.0 * quad::adaptive_panels(over_u, br, 1e-10).value;
}

std::string to_string(Proposition p) {
  switch (p) {
    case Proposition::P3_5_mass: return "P3_5_mass";
    case Proposition::P3_5_gradient: return "P3_5_gradient";
    case Proposition::P3_6_mixed: return "P3_6_mixed";
    case Proposition::P3_7_third: return "P3_7_third";
    case Proposition::P3_8_pointwise: return "P3_8_pointwise";
  }
  return "?";
}

Proposition parse_proposition(const std::string& s) {
  for (auto p : {Proposition::P3_5_mass, Proposition::P3_5_gradient, Proposition::P3_6_mixed,
                 Proposition::P3_7_third, Proposition::P3_8_pointwise})
    if (to_string(p) == s) return p;
  throw InvalidArgument("unknown proposition '" + s + "'");
}

double pointwise_bound_ratio(int j, int l, double t, int grid_n, const GroupDescriptor& g) {
  if (grid_n < 2) throw InvalidArgument("grid_n must be at least 2");
  if (!g.is_abelian()) throw UnsupportedRegime("pointwise bound check needs abelian N");
  double best = 0.0;
  for (int a = 0; a < grid_n; ++a) {
    for (int b = 0; b < grid_n; ++b) {
      PointG x{PointN(g.dim()), -4.0 + 8.0 * b / (grid_n - 1)};
      x.z[0] = -4.0 + 8.0 * a / (grid_n - 1);
      const double v = std::abs(h_second_star(j, l, t, x, g).value);
      best = std::max(best, v * std::pow(t, 1.5) * std::exp(0.5 * g.Q * x.u) / std::cosh(x.u));
    }
  }
  return best;
}

EstimateReport verify_proposition(Proposition which, double epsilon, const std::vector<double>& t_grid,
                                  const QuadratureSpec& budget, const GroupDescriptor& g,
                                  const ProofCheckOptions& opt) {
  if (t_grid.size() < 2) throw InvalidArgument("t grid needs at least 2 values");
  for (double t : t_grid)
    if (!(t > 0)) throw InvalidArgument("t values must be positive");
  budget.validate();
  auto in = [&](int i) { return i >= 1 && i <= g.q; };
  EstimateReport rep;
  rep.label = to_string(which);
  rep.epsilon = epsilon;
  rep.t_values = t_grid;
  std::vector<int> word;
  switch (which) {
    case Proposition::P3_5_mass:
      rep.target_slope = 0.0;
      rep.tolerance = 0.1;
      break;
    case Proposition::P3_5_gradient:
      rep.target_slope = -0.5;
      rep.tolerance = 0.1;
      break;
    case Proposition::P3_6_mixed: {
      if (!in(opt.j) || !in(opt.l)) throw InvalidArgument("P3_6 needs j, l in 1..q");
      word = {opt.j, kStar, opt.l};
      const double tmax = *std::max_element(t_grid.begin(), t_grid.end());
      const double tmin = *std::min_element(t_grid.begin(), t_grid.end());
      if (tmin >= 1.0) rep.target_slope = -1.5;
      else if (tmax <= 0.5) rep.target_slope = -1.0;
      else throw InvalidArgument("P3_6 t grid must lie in [1, inf) or (0, 1/2]");
      rep.tolerance = 0.15;
      rep.label += "_j" + std::to_string(opt.j) + "_l" + std::to_string(opt.l);
      break;
    }
    case Proposition::P3_7_third:
      if (!in(opt.j) || opt.k < 0 || opt.k > g.q || opt.l < 0 || opt.l > g.q || (opt.k == 0 && opt.l == 0))
        throw InvalidArgument("P3_7 needs j in 1..q and (k, l) != (0, 0)");
      word = {opt.l, opt.k, kStar, opt.j};
      rep.target_slope = -1.5;
      rep.tolerance = 0.15;
      rep.label += "_l" + std::to_string(opt.l) + "_k" + std::to_string(opt.k) + "_j" + std::to_string(opt.j);
      break;
    case Proposition::P3_8_pointwise:
      if (opt.j < 0 || opt.j > g.q || opt.l < 0 || opt.l > g.q) throw InvalidArgument("P3_8 indices out of range");
      rep.target_slope = 0.0;
      rep.tolerance = std::numeric_limits<double>::infinity();  // only uniformity is claimed
      rep.label += "_j" + std::to_string(opt.j) + "_l" + std::to_string(opt.l);
      break;
  }
  if (opt.slope_tolerance >= 0) rep.tolerance = opt.slope_tolerance;

  for (double t : t_grid) {
    if (which == Proposition::P3_8_pointwise) {
      rep.norms.push_back(pointwise_bound_ratio(opt.j, opt.l, t, opt.grid_n, g));
      rep.est_abs_errors.push_back(0.0);
      continue;
    }
    KernelField f = which == Proposition::P3_5_gradient
                        ? pointwise_norm(gradient_fields({}, t, g, budget))
                        : heat_field(word, t, g, budget);
    const IntegralResult r = weighted_l1_result(f, epsilon, t);
    rep.norms.push_back(r.value);
    rep.est_abs_errors.push_back(r.est_abs_error);
    if (!r.trusted) {
      rep.trusted = false;
      rep.diagnosis += "t=" + std::to_string(t) + ": " + r.diagnosis + "; ";
    }
  }

  std::vector<double> ratios;
  for (std::size_t i = 0; i < t_grid.size(); ++i)
    ratios.push_back(rep.norms[i] * std::pow(t_grid[i], -rep.target_slope));
  bool positive = true;
  for (double v : rep.norms) positive = positive && v > 0;
  if (positive) {
    std::tie(rep.fitted_slope, std::ignore) = loglog_fit(t_grid, rep.norms);
  } else {
    rep.fitted_slope = std::numeric_limits<double>::quiet_NaN();
    rep.diagnosis += "zero norm on the grid; ";
  }
  rep.fitted_constant = *std::max_element(ratios.begin(), ratios.end());
  const double med = median(ratios);
  rep.ratio_spread = med > 0 ? rep.fitted_constant / med : std::numeric_limits<double>::infinity();
  const bool slope_ok = positive && std::abs(rep.fitted_slope - rep.target_slope) <= rep.tolerance;
  const bool uniform = std::isfinite(rep.fitted_constant) && rep.ratio_spread < opt.max_spread;
  rep.passed = rep.trusted && slope_ok && uniform;
  if (!slope_ok && positive)
    rep.diagnosis += "slope " + std::to_string(rep.fitted_slope) + " off target " +
                     std::to_string(rep.target_slope) + "; ";
  if (!uniform) rep.diagnosis += "constant ratio spread " + std::to_string(rep.ratio_spread) + "; ";
  return rep;
}

}  // namespace naheat
