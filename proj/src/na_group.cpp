#include "naheat/na_group.hpp"

#include "naheat/integrate.hpp"
#include "naheat/quadrature.hpp"

#include <cmath>
#include <map>
#include <mutex>
#include <numbers>

namespace naheat {

namespace {
constexpr double kPi = std::numbers::pi;
}

std::string to_string(QuadMethod m) {
  switch (m) {
    case QuadMethod::tensor_gauss: return "tensor_gauss";
    case QuadMethod::adaptive: return "adaptive";
    case QuadMethod::monte_carlo: return "monte_carlo";
  }
  return "?";
}

QuadMethod parse_quad_method(const std::string& s) {
  if (s == "tensor_gauss" || s == "tensor") return QuadMethod::tensor_gauss;
  if (s == "adaptive" || s == "shell") return QuadMethod::adaptive;
  if (s == "monte_carlo" || s == "mc") return QuadMethod::monte_carlo;
  throw InvalidArgument("unknown quadrature method '" + s + "'");
}

void QuadratureSpec::validate() const {
  if (!(u_halfwidth > 0)) throw InvalidArgument("u_halfwidth must be positive");
  if (n_radius < 0 || d_radius < 0) throw InvalidArgument("truncation radii must be positive (or 0 for automatic)");
  if (!(rel_tol > 0 && rel_tol < 1)) throw InvalidArgument("rel_tol must lie in (0, 1)");
  if (nodes_per_dim < 2 || nodes_per_dim > 200) throw InvalidArgument("nodes_per_dim out of range");
  if (method == QuadMethod::monte_carlo && n_samples < 100) throw InvalidArgument("too few Monte Carlo samples");
}

PointG g_identity(const GroupDescriptor& g) { return {n_zero(g), 0.0}; }

PointG g_multiply(const PointG& x, const PointG& y, const GroupDescriptor& g) {
  return {n_multiply(x.z, dilate(std::exp(x.u), y.z, g), g), x.u + y.u};
}

PointG g_inverse(const PointG& x, const GroupDescriptor& g) {
  return {n_inverse(dilate(std::exp(-x.u), x.z, g), g), -x.u};
}

double modular(const PointG& x, const GroupDescriptor& g) { return std::exp(-g.Q * x.u); }

double g_cosh_distance(const PointG& x, const GroupDescriptor& g) {
  const double n = n_norm(x.z, g);
  return std::cosh(x.u) + 0.5 * std::exp(-x.u) * n * n;
}

double g_distance(const PointG& x, const GroupDescriptor& g) {
  double c = g_cosh_distance(x, g);
  if (c < 1.0) {
    if (c < 1.0 - 1e-12) throw std::domain_error("g_distance: arccosh argument below 1");
    c = 1.0;
  }
  return std::acosh(c);
}

double g_distance(const PointG& x, const PointG& y, const GroupDescriptor& g) {
  return g_distance(g_multiply(g_inverse(x, g), y, g), g);
}

KernelField involution(const KernelField& f) {
  KernelField r = f;
  const GroupDescriptor g = f.descriptor;
  auto ev = f.evaluate;
  r.evaluate = [ev, g](const PointG& x) { return modular(x, g) * ev(g_inverse(x, g)); };
  if (f.on_shell) {
    auto sh = f.on_shell;
    r.on_shell = [sh, g](double rad) -> ShellEvaluator {
      // |x^{-1}|_d = |x|_d, so the same shell data serves the inverse point
      ShellEvaluator inner = sh(rad);
      return [inner, g](const PointG& x) { return modular(x, g) * inner(g_inverse(x, g)); };
    };
  }
  return r;
}

KernelField scaled(const KernelField& f, double a) {
  KernelField r = f;
  auto ev = f.evaluate;
  r.evaluate = [ev, a](const PointG& x) { return a * ev(x); };
  if (f.on_shell) {
    auto sh = f.on_shell;
    r.on_shell = [sh, a](double rad) -> ShellEvaluator {
      ShellEvaluator inner = sh(rad);
      return [inner, a](const PointG& x) { return a * inner(x); };
    };
  }
  return r;
}

KernelField pointwise_norm(const std::vector<KernelField>& parts) {
  if (parts.empty()) throw InvalidArgument("pointwise_norm: no parts");
  KernelField r = parts.front();
  r.evaluate = [parts](const PointG& x) {
    double s = 0.0;
    for (const auto& p : parts) {
      const double v = p.evaluate(x);
      s += v * v;
    }
    return std::sqrt(s);
  };
  bool all_shell = true;
  for (const auto& p : parts) all_shell = all_shell && static_cast<bool>(p.on_shell);
  if (all_shell) {
    r.on_shell = [parts](double rad) -> ShellEvaluator {
      std::vector<ShellEvaluator> ev;
      ev.reserve(parts.size());
      for (const auto& p : parts) ev.push_back(p.on_shell(rad));
      return [ev](const PointG& x) {
        double s = 0.0;
        for (const auto& e : ev) {
          const double v = e(x);
          s += v * v;
        }
        return std::sqrt(s);
      };
    };
  } else {
    r.on_shell = nullptr;
  }
  return r;
}

KernelField right_translate(const KernelField& f, const PointG& y) {
  KernelField r = f;
  const GroupDescriptor g = f.descriptor;
  auto ev = f.evaluate;
  r.evaluate = [ev, y, g](const PointG& x) { return ev(g_multiply(x, y, g)); };
  r.on_shell = nullptr;
  return r;
}

ConvolutionResult convolve_at(const KernelField& f, const KernelField& g, const PointG& x) {
  const GroupDescriptor G = g.descriptor;
  KernelField integrand = g;
  auto fe = f.evaluate;
  auto ge = g.evaluate;
  integrand.evaluate = [fe, ge, x, G](const PointG& y) {
    return fe(g_multiply(x, g_inverse(y, G), G)) * ge(y);
  };
  if (g.on_shell) {
    auto sh = g.on_shell;
    integrand.on_shell = [fe, sh, x, G](double rad) -> ShellEvaluator {
      ShellEvaluator gs = sh(rad);
      return [fe, gs, x, G](const PointG& y) {
        return fe(g_multiply(x, g_inverse(y, G), G)) * gs(y);
      };
    };
  }
  integrand.time_scale = std::max(f.time_scale, g.time_scale);
  IntegrateOptions opt;
  opt.reduce = Reduce::signed_value;
  IntegralResult r = integrate(integrand, opt);
  return {r.value, r.est_abs_error, r.trusted};
}

double frame_derivative_fd(const std::function<double(const PointG&)>& f, int j, const PointG& x,
                           const GroupDescriptor& g, double step) {
  if (j < 0 || j > g.q) throw InvalidArgument("frame index out of range");
  PointG plus = x, minus = x;
  if (j == 0) {
    plus.u += step;
    minus.u -= step;
  } else {
    PointG e = g_identity(g);
    e.z[j - 1] = step;
    plus = g_multiply(x, e, g);
    e.z[j - 1] = -step;
    minus = g_multiply(x, e, g);
  }
  return (f(plus) - f(minus)) / (2.0 * step);
}

double horizontal_gradient_norm(const KernelField& f, const PointG& x,
                                const std::vector<KernelField>* derivatives) {
  const GroupDescriptor& g = f.descriptor;
  double s = 0.0;
  if (derivatives) {
    if (static_cast<int>(derivatives->size()) != g.q + 1)
      throw InvalidArgument("horizontal_gradient_norm: need q+1 derivative fields");
    for (const auto& d : *derivatives) {
      const double v = d.evaluate(x);
      s += v * v;
    }
  } else {
    for (int j = 0; j <= g.q; ++j) {
      const double v = frame_derivative_fd(f.evaluate, j, x, g);
      s += v * v;
    }
  }
  return std::sqrt(s);
}

double radial_integral(const std::function<double(double)>& profile, double R_max,
                       const GroupDescriptor& g) {
  if (!(R_max >= 0)) throw InvalidArgument("radial_integral: negative radius");
  const int Q = g.Q;
  auto f = [&](double r) { return profile(r) * std::pow(std::sinh(r), Q); };
  auto br = quad::panel_breaks(0.0, R_max, 1.0);
  return estimate_CN(g) * quad::adaptive_panels(f, br, 1e-12).value;
}

namespace {

// Direct Int_G exp(-|x|_d^2) dmu without the coarea formula.
double direct_gaussian_mass(const GroupDescriptor& g) {
  const double U = 8.0;                  // exp(-64) beyond
  const double cmax = std::cosh(8.0);
  auto fr = [](double c) {
    const double r = std::acosh(std::max(c, 1.0));
    return std::exp(-r * r);
  };
  if (g.is_abelian() && (g.Q == 1 || g.Q == 2)) {
    const int Q = g.Q;
    auto outer = [&](double u) {
      const double span = 2.0 * std::exp(u) * (cmax - std::cosh(u));
      if (span <= 0) return 0.0;
      const double zmax = std::sqrt(span);
      auto inner = [&](double z) {
        const double c = std::cosh(u) + 0.5 * std::exp(-u) * z * z;
        return (Q == 1 ? 2.0 : 2.0 * kPi * z) * fr(c);
      };
      auto br = quad::panel_breaks(0.0, zmax, std::max(zmax / 16.0, 1e-3));
      return quad::adaptive_panels(inner, br, 1e-11).value;
    };
    auto br = quad::panel_breaks(-U, U, 0.5);
    return quad::adaptive_panels(outer, br, 1e-11).value;
  }
  if (g.kind == GroupKind::Heisenberg1) {
    auto outer = [&](double u) {
      const double budget = 2.0 * std::exp(u) * (cmax - std::cosh(u));  // |z|_N^2 bound
      if (budget <= 0) return 0.0;
      const double nmax = std::sqrt(budget);
      auto over_rho = [&](double rho) {
        auto over_w = [&](double w) {
          PointN z{rho, 0.0, w};
          const double n = n_norm(z, g);
          const double c = std::cosh(u) + 0.5 * std::exp(-u) * n * n;
          return fr(c);
        };
        // |w| <= |z|_N^2 / (4 pi)
        const double wmax = nmax * nmax / (4.0 * kPi);
        auto br = quad::panel_breaks(0.0, wmax, std::max(wmax / 8.0, 1e-3));
        return 2.0 * 2.0 * kPi * rho * quad::adaptive_panels(over_w, br, 1e-8).value;
      };
      auto br = quad::panel_breaks(0.0, nmax, std::max(nmax / 8.0, 1e-3));
      return quad::adaptive_panels(over_rho, br, 1e-8).value;
    };
    auto br = quad::panel_breaks(-U, U, 1.0);
    return quad::adaptive_panels(outer, br, 1e-8).value;
  }
  throw UnsupportedRegime("estimate_CN: direct quadrature implemented for abelian Q <= 2 and Heisenberg");
}

}  // namespace

double estimate_CN(const GroupDescriptor& g) {
  static std::mutex mutex;
  static std::map<std::string, double> cache;
  {
    std::lock_guard lock(mutex);
    auto it = cache.find(g.name());
    if (it != cache.end()) return it->second;
  }
  auto radial = [&](double r) { return std::exp(-r * r) * std::pow(std::sinh(r), g.Q); };
  auto br = quad::panel_breaks(0.0, 8.0, 0.5);
  const double rad = quad::adaptive_panels(radial, br, 1e-12).value;
  const double cn = direct_gaussian_mass(g) / rad;
  std::lock_guard lock(mutex);
  cache.emplace(g.name(), cn);
  return cn;
}

double ball_volume_direct(double R, const GroupDescriptor& g) {
  if (!(R > 0)) throw InvalidArgument("ball_volume_direct: R must be positive");
  if (!g.is_abelian() || g.Q > 2)
    throw UnsupportedRegime("ball_volume_direct: abelian Q <= 2 only");
  const double cR = std::cosh(R);
  // for fixed u the section {z : |x|_d <= R} is a ball of radius sqrt(2 e^u (cosh R - cosh u))
  auto f = [&](double u) {
    const double s2 = std::max(0.0, 2.0 * std::exp(u) * (cR - std::cosh(u)));
    return g.Q == 1 ? 2.0 * std::sqrt(s2) : kPi * s2;
  };
  auto br = quad::panel_breaks(-R, R, std::min(0.5, R / 4));
  return quad::adaptive_panels(f, br, 1e-12).value;
}

}  // namespace naheat
