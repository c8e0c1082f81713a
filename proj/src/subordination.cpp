#include "naheat/subordination.hpp"

#include "naheat/quadrature.hpp"
#include "naheat/stratified_group.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

namespace naheat {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kTailDrop = 37.0;  // ~1e-16 relative to the envelope peak
const double kLogNormPsi = -0.5 * std::log(4.0 * kPi * kPi * kPi);  // 1/sqrt(4 pi^3)
constexpr int kThetaOrder = 16;

void check_time(double t) {
  if (!(t > 0)) throw InvalidArgument("time must be positive");
  if (t < kTMin)
    throw UnsupportedRegime("subordination weight needs t >= " + std::to_string(kTMin) +
                            " (got " + std::to_string(t) + ")");
}

void check_xi(double xi) {
  if (!(xi > 0) || !std::isfinite(xi)) throw InvalidArgument("xi must be positive");
}

double log_sinh(double x) {
  if (x < 1.0) return std::log(std::sinh(x));
  return x + std::log1p(-std::exp(-2.0 * x)) - std::numbers::ln2;
}

// width <= 1 dividing the half period 2t, so panels align with sign changes of sin(pi theta / 2t)
double half_period_width(double t) { return 2.0 * t / std::ceil(2.0 * t); }

double theta_cutoff(const std::function<double(double)>& log_env) {
  return quad::find_cutoff(log_env, 1e-3, kTailDrop, 0.05, 200000);
}

// xi^-2 Int_0^thmax f(theta) dtheta over half-period panels
PsiEval xi_weighted(double t, double xi, double rel_tol, double width,
                    const std::function<double(double)>& log_env,
                    const std::function<double(double)>& f) {
  const double thmax = theta_cutoff(log_env);
  const auto br = quad::panel_breaks(0.0, thmax, width);
  quad::QuadResult q = quad::adaptive_panels(f, br, rel_tol);
  const double s = 1.0 / (xi * xi);
  return {t, xi, s * q.value, s * q.abs_error + 1e-16 * std::abs(s * q.value)};
}

}  // namespace

double log_cosh(double x) {
  const double a = std::abs(x);
  return a + std::log1p(std::exp(-2.0 * a)) - std::numbers::ln2;
}

double Scaled::value() const { return mant == 0.0 ? 0.0 : mant * std::exp(log_scale); }

PsiEval psi(double t, double xi, double rel_tol) {
  check_time(t);
  check_xi(xi);
  const double lead = kPi * kPi / (4.0 * t) - 0.5 * std::log(t) + kLogNormPsi;
  auto env = [=](double th) { return log_sinh(th) - th * th / (4.0 * t) - std::cosh(th) / xi; };
  auto f = [=](double th) {
    return std::sin(kPi * th / (2.0 * t)) *
           std::exp(lead + log_sinh(th) - th * th / (4.0 * t) - std::cosh(th) / xi);
  };
  return xi_weighted(t, xi, rel_tol, half_period_width(t), env, f);
}

PsiEval psi_xi_derivative(double t, double xi, double rel_tol) {
  check_time(t);
  check_xi(xi);
  // 1/(4 sqrt(pi^3 t^3))
  const double lead = kPi * kPi / (4.0 * t) - std::log(4.0) - 1.5 * std::log(kPi * t);
  auto env = [=](double th) {
    return log_cosh(th) + std::log(kPi + th) - th * th / (4.0 * t) - std::cosh(th) / xi;
  };
  auto f = [=](double th) {
    const double a = kPi * th / (2.0 * t);
    return (kPi * std::cos(a) - th * std::sin(a)) *
           std::exp(lead + log_cosh(th) - th * th / (4.0 * t) - std::cosh(th) / xi);
  };
  return xi_weighted(t, xi, rel_tol, half_period_width(t), env, f);
}

PsiEval psi_second_xi_derivative(double t, double xi, double rel_tol) {
  check_time(t);
  check_xi(xi);
  const double lead = kPi * kPi / (4.0 * t) - std::log(4.0) - 1.5 * std::log(kPi * t);
  auto env = [=](double th) {
    return 2.0 * log_cosh(th) + std::log(kPi + th) - th * th / (4.0 * t) - std::cosh(th) / xi;
  };
  auto f = [=](double th) {
    const double a = kPi * th / (2.0 * t);
    const double ch = std::cosh(th);
    return (kPi * std::cos(a) - th * std::sin(a)) * (ch / xi - 1.0) *
           std::exp(lead + log_cosh(th) - th * th / (4.0 * t) - ch / xi);
  };
  return xi_weighted(t, xi, rel_tol, half_period_width(t), env, f);
}

double psi_xi_derivative_scaled(double sigma, double xi, double rel_tol) {
  check_xi(xi);
  if (sigma < 0) throw InvalidArgument("sigma must be nonnegative");
  const double s2 = sigma * sigma;
  const double lead = kPi * kPi * s2 / 4.0 - std::log(4.0) - 1.5 * std::log(kPi);
  auto env = [=](double th) {
    return log_cosh(th) + std::log(kPi + th) - th * th * s2 / 4.0 - std::cosh(th) / xi;
  };
  auto f = [=](double th) {
    const double a = kPi * th * s2 / 2.0;
    return (kPi * std::cos(a) - th * std::sin(a)) *
           std::exp(lead + log_cosh(th) - th * th * s2 / 4.0 - std::cosh(th) / xi);
  };
  return xi_weighted(0.0, xi, rel_tol, 1.0, env, f).value;
}

double cosine_gauss_integral(double theta) {
  const auto& rule = quad::gauss_legendre(64);
  const double half = 0.5 * kPi;
  double s = 0.0;
  for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
    const double x = half + half * rule.nodes[i];
    s += rule.weights[i] * std::cos(0.5 * x * theta) * std::exp(0.25 * x * x);
  }
  return half * s;
}

PsiEval psi_time_integrated(double xi, double rel_tol) {
  check_xi(xi);
  auto env = [=](double th) { return log_cosh(th) - th * th / 4.0 - std::cosh(th) / xi + 2.0; };
  auto f = [=](double th) {
    return cosine_gauss_integral(th) *
           std::exp(kLogNormPsi + log_cosh(th) - th * th / 4.0 - std::cosh(th) / xi);
  };
  PsiEval r = xi_weighted(0.0, xi, rel_tol, 0.5, env, f);
  return r;
}

PsiEval psi_second_time_integrated(double xi, double rel_tol) {
  check_xi(xi);
  auto env = [=](double th) {
    return 2.0 * log_cosh(th) - th * th / 4.0 - std::cosh(th) / xi + 2.0;
  };
  auto f = [=](double th) {
    const double ch = std::cosh(th);
    return cosine_gauss_integral(th) * (ch / xi - 1.0) *
           std::exp(kLogNormPsi + log_cosh(th) - th * th / 4.0 - ch / xi);
  };
  return xi_weighted(0.0, xi, rel_tol, 0.5, env, f);
}

PsiEval psi_xi_derivative_time_integral(double t0, double t1, double xi, double rel_tol) {
  check_time(t0);
  if (!(t1 > t0)) throw InvalidArgument("need t1 > t0");
  check_xi(xi);
  double err = 0.0;
  auto f = [&](double v) {
    const double t = std::exp(v);
    PsiEval p = psi_xi_derivative(t, xi, 0.01 * rel_tol);
    err += p.est_abs_error * t;
    return t * p.value;
  };
  const auto br = quad::panel_breaks(std::log(t0), std::log(t1), 0.5);
  quad::QuadResult q = quad::adaptive_panels(f, br, rel_tol);
  return {0.0, xi, q.value, q.abs_error};
}

PsiEval psi_xi_derivative_tail(double T, double xi, double rel_tol) {
  check_time(T);
  check_xi(xi);
  // t = sigma^-2: Int_T^inf D dt = Int_0^{T^-1/2} 2 sigma^-3 D dsigma = 2 Int (t^{3/2} D) dsigma
  auto f = [&](double s) { return 2.0 * psi_xi_derivative_scaled(s, xi, 0.01 * rel_tol); };
  const double s0 = 1.0 / std::sqrt(T);
  const auto br = quad::panel_breaks(0.0, s0, s0 / 4.0);
  quad::QuadResult q = quad::adaptive_panels(f, br, rel_tol);
  return {0.0, xi, q.value, q.abs_error};
}

double psi_mass(double t, double rel_tol) {
  check_time(t);
  // xi = e^s; Int_R e^{-cosh u/xi} du = 2 K_0(1/xi)
  auto f = [&](double s) {
    const double xi = std::exp(s);
    const double k0 = 2.0 * std::cyl_bessel_k(0.0, 1.0 / xi);
    return psi(t, xi, 0.01 * rel_tol).value * k0 * xi;
  };
  const auto br = quad::panel_breaks(-6.5, 60.0, 1.0);
  return quad::adaptive_panels(f, br, rel_tol).value;
}

double time_integrated_bound_shape(double xi) {
  check_xi(xi);
  auto f = [=](double th) { return std::exp(log_cosh(th) - th * th / 4.0 - std::cosh(th) / xi); };
  auto env = [=](double th) { return log_cosh(th) - th * th / 4.0 - std::cosh(th) / xi; };
  return xi_weighted(0.0, xi, 1e-12, 0.5, env, f).value;
}

double time_integrated_bound_shape_second(double xi) {
  check_xi(xi);
  auto f = [=](double th) {
    return std::exp(2.0 * log_cosh(th) - th * th / 4.0 - std::cosh(th) / xi);
  };
  auto env = [=](double th) { return 2.0 * log_cosh(th) - th * th / 4.0 - std::cosh(th) / xi; };
  return xi_weighted(0.0, xi, 1e-12, 0.5, env, f).value / xi;
}

// ---------------------------------------------------------------------------

namespace {

// log |g_t(theta)| and its sign for one weight kind
struct LogSigned {
  double log_abs;
  int sign;
};

LogSigned weight_log(WeightKind kind, double t, double th) {
  switch (kind) {
    case WeightKind::Psi: {
      const double s = std::sin(kPi * th / (2.0 * t));
      return {log_sinh(th) + std::log(std::abs(s)) + (kPi * kPi - th * th) / (4.0 * t) -
                  0.5 * std::log(t) + kLogNormPsi,
              s > 0 ? 1 : (s < 0 ? -1 : 0)};
    }
    case WeightKind::D1: {
      const double a = kPi * th / (2.0 * t);
      const double b = kPi * std::cos(a) - th * std::sin(a);
      return {log_cosh(th) + std::log(std::abs(b)) + (kPi * kPi - th * th) / (4.0 * t) -
                  std::log(4.0) - 1.5 * std::log(kPi * t),
              b > 0 ? 1 : (b < 0 ? -1 : 0)};
    }
    case WeightKind::T1: {
      const double c = cosine_gauss_integral(th);
      return {log_cosh(th) + std::log(std::abs(c)) - th * th / 4.0 + kLogNormPsi,
              c > 0 ? 1 : (c < 0 ? -1 : 0)};
    }
  }
  return {-std::numeric_limits<double>::infinity(), 0};
}

double theta_max(WeightKind kind, double t) {
  if (kind == WeightKind::T1) return 24.0;
  // envelope sinh(theta) e^{-theta^2/4t} peaks at 2t; cover 40 e-folds beyond for any cosh r
  return 2.0 * t + std::sqrt(160.0 * t) + 4.0;
}

ThetaRule build_rule(const quad::NodeSet& th,
                     const std::function<LogSigned(double)>& weight) {
  ThetaRule r;
  r.log_abs.reserve(th.size());
  for (std::size_t i = 0; i < th.size(); ++i) {
    const LogSigned g = weight(th.x[i]);
    if (g.sign == 0 || !std::isfinite(g.log_abs)) continue;
    r.log_abs.push_back(g.log_abs + std::log(th.w[i]));
    r.sign.push_back(static_cast<signed char>(g.sign));
    r.log_cosh.push_back(log_cosh(th.x[i]));
  }
  return r;
}

}  // namespace

ThetaRule theta_rule(WeightKind kind, double t) {
  if (kind != WeightKind::T1) check_time(t);
  const double width = kind == WeightKind::T1 ? 0.5 : half_period_width(t);
  const auto nodes =
      quad::composite_nodes(quad::panel_breaks(0.0, theta_max(kind, t), width), kThetaOrder);
  return build_rule(nodes, [&](double th) { return weight_log(kind, t, th); });
}

ThetaRule theta_rule_time_integrated(WeightKind kind, double t0, double t1, double p,
                                     TimeRule rule) {
  if (kind == WeightKind::T1) throw InvalidArgument("T1 is already time integrated");
  check_time(t0);
  if (!(t1 > t0)) throw InvalidArgument("need t1 > t0");
  quad::NodeSet tn;
  if (rule == TimeRule::gauss32) {
    tn = quad::composite_nodes(t0, t1, 1, 32);
  } else {
    tn = quad::composite_nodes(quad::panel_breaks(std::log(t0), std::log(t1), 0.25), 16);
    for (std::size_t i = 0; i < tn.size(); ++i) {
      tn.x[i] = std::exp(tn.x[i]);
      tn.w[i] *= tn.x[i];
    }
  }
  std::vector<double> logw(tn.size());
  for (std::size_t i = 0; i < tn.size(); ++i) logw[i] = std::log(tn.w[i]) + p * std::log(tn.x[i]);
  const double width = std::min(1.0, half_period_width(t0));
  const auto nodes =
      quad::composite_nodes(quad::panel_breaks(0.0, theta_max(kind, t1), width), kThetaOrder);
  std::vector<LogSigned> col(tn.size());
  return build_rule(nodes, [&](double th) -> LogSigned {
    double mx = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < tn.size(); ++i) {
      col[i] = weight_log(kind, tn.x[i], th);
      col[i].log_abs += logw[i];
      if (col[i].sign != 0) mx = std::max(mx, col[i].log_abs);
    }
    if (!std::isfinite(mx)) return {mx, 0};
    double s = 0.0;
    for (const auto& c : col)
      if (c.sign != 0) s += c.sign * std::exp(c.log_abs - mx);
    if (s == 0.0) return {-std::numeric_limits<double>::infinity(), 0};
    return {mx + std::log(std::abs(s)), s > 0 ? 1 : -1};
  });
}

void theta_moments(const ThetaRule& rule, double r, const double* m, const double* P,
                   std::size_t count, Scaled* out, double* cond) {
  const double lr = log_cosh(r);
  const std::size_t n = rule.size();
  thread_local std::vector<double> L, e;
  L.resize(n);
  e.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double a = std::max(lr, rule.log_cosh[i]);
    const double b = std::min(lr, rule.log_cosh[i]);
    L[i] = a + std::log1p(std::exp(b - a));
  }
  for (std::size_t k = 0; k < count; ++k) {
    double mx = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < n; ++i) {
      e[i] = rule.log_abs[i] + m[k] * rule.log_cosh[i] + (1.0 - P[k]) * L[i];
      mx = std::max(mx, e[i]);
    }
    if (!std::isfinite(mx)) {
      out[k] = {0.0, 0.0};
      if (cond) cond[k] = 1.0;
      continue;
    }
    double s = 0.0, a = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double d = e[i] - mx;
      if (d > -745.0) {
        const double v = std::exp(d);
        s += rule.sign[i] * v;
        a += v;
      }
    }
    out[k] = {s, mx};
    if (cond) cond[k] = s != 0.0 ? a / std::abs(s) : std::numeric_limits<double>::infinity();
  }
}

Scaled theta_moment(const ThetaRule& rule, double r, double m, double P) {
  Scaled s;
  theta_moments(rule, r, &m, &P, 1, &s);
  return s;
}

}  // namespace naheat
