#include "naheat/integrate.hpp"

#include "naheat/quadrature.hpp"

#include <omp.h>

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <functional>
#include <numbers>
#include <random>
#include <vector>

namespace naheat {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kLogDrop = 40.0;  // e^-40 below the peak
constexpr int kCirclePoints = 48;

constexpr double kStudentNu = 4.0;

double student_log_density(double b) {
  const double nu = kStudentNu;
  return std::lgamma(0.5 * (nu + 1)) - std::lgamma(0.5 * nu) - 0.5 * std::log(nu * kPi) -
         0.5 * (nu + 1) * std::log1p(b * b / nu);
}

double weight_at(const IntegrateOptions& opt, double r) {
  return opt.radial_weight ? opt.radial_weight(r) : 1.0;
}

double reduce(const IntegrateOptions& opt, double v) {
  return opt.reduce == Reduce::absolute ? std::abs(v) : v;
}

double truncation_radius(const KernelField& f, const IntegrateOptions& opt) {
  if (f.quadrature.d_radius > 700) throw InvalidArgument("d_radius above 700 overflows the shell rule");
  if (f.quadrature.d_radius > 0) return f.quadrature.d_radius;
  return auto_radius(f.time_scale, f.descriptor.Q, opt.weight_rate);
}

// radial breakpoints: width w0 near the origin, growing like sqrt(r) further out
std::vector<double> radial_breaks(double R, double t) {
  const double w0 = 0.5 * std::min(1.0, std::sqrt(t));
  std::vector<double> b{0.0};
  double r = 0.0;
  while (r < R) {
    const double w = w0 * std::max(1.0, 0.25 * std::sqrt(r));
    r = std::min(R, r + w);
    if (R - r < 0.25 * w0) r = R;
    b.push_back(r);
  }
  return b;
}

// Int_0^{2pi} f or |f| dphi. The periodic midpoint rule is spectral for smooth f, but |f| has
// kinks at sign changes: there the circle is split at the roots and each arc gets Gauss-Legendre.
double circle_integral(const std::function<double(double)>& f, bool absolute) {
  const double h = 2.0 * kPi / kCirclePoints;
  std::vector<double> phi(kCirclePoints), v(kCirclePoints);
  double s = 0.0;
  bool sign_change = false;
  for (int k = 0; k < kCirclePoints; ++k) {
    phi[k] = h * (k + 0.5);
    v[k] = f(phi[k]);
    s += absolute ? std::abs(v[k]) : v[k];
    if (k > 0 && (v[k] > 0) != (v[k - 1] > 0)) sign_change = true;
  }
  if (!absolute || !(sign_change || (v[0] > 0) != (v[kCirclePoints - 1] > 0))) return s * h;
  std::vector<double> roots;
  for (int k = 0; k < kCirclePoints; ++k) {
    const int k1 = (k + 1) % kCirclePoints;
    if ((v[k] > 0) == (v[k1] > 0)) continue;
    // Illinois regula falsi on [phi_k, phi_k + h]
    double a = phi[k], b = phi[k] + h, fa = v[k], fb = v[k1];
    for (int it = 0, side = 0; it < 60 && b - a > 1e-14; ++it) {
      const double c = (a * fb - b * fa) / (fb - fa);
      const double fc = f(c);
      if (fc == 0) {
        a = b = c;
        break;
      }
      if ((fc > 0) == (fb > 0)) {
        b = c;
        fb = fc;
        if (side == -1) fa *= 0.5;
        side = -1;
      } else {
        a = c;
        fa = fc;
        if (side == 1) fb *= 0.5;
        side = 1;
      }
    }
    roots.push_back(0.5 * (a + b));
  }
  roots.push_back(roots.front() + 2.0 * kPi);
  const quad::GaussRule& gl = quad::gauss_legendre(16);
  double total = 0.0;
  for (std::size_t i = 0; i + 1 < roots.size(); ++i) {
    const double lo = roots[i], hi = roots[i + 1];
    const double mid = 0.5 * (lo + hi), half = 0.5 * (hi - lo);
    double arc = 0.0;
    for (std::size_t q = 0; q < gl.nodes.size(); ++q) arc += gl.weights[q] * std::abs(f(mid + half * gl.nodes[q]));
    total += half * arc;
  }
  return total;
}

struct ShellValue {
  double value = 0.0;
  double err = 0.0;
};

ShellValue shell_value(const KernelField& f, const IntegrateOptions& opt, double r) {
  const GroupDescriptor& g = f.descriptor;
  const int Q = g.Q;
  const ShellEvaluator ev = f.shell(r);
  auto inner = [&](double beta) {
    const double u = r * std::sin(beta);
    // cosh r - cosh u = 2 sinh((r+u)/2) sinh((r-u)/2), no cancellation
    const double gap = 2.0 * std::sinh(0.5 * (r + u)) * std::sinh(0.5 * (r - u));
    if (!(gap > 0)) return 0.0;
    const double rho = std::sqrt(2.0 * gap);
    const double jac = r * std::cos(beta) * std::exp(0.5 * Q * u);
    const double a = std::exp(0.5 * u) * rho;
    PointG x{PointN(g.dim()), u};
    if (Q == 1) {
      x.z[0] = a;
      double s = reduce(opt, ev(x));
      x.z[0] = -a;
      s += reduce(opt, ev(x));
      return jac / rho * s;
    }
    auto at = [&](double phi) {
      x.z[0] = a * std::cos(phi);
      x.z[1] = a * std::sin(phi);
      return ev(x);
    };
    return jac * circle_integral(at, opt.reduce == Reduce::absolute);
  };
  const double rel = std::max(f.quadrature.rel_tol, 1e-13);
  const std::vector<double> br{-0.5 * kPi, 0.0, 0.5 * kPi};
  quad::QuadResult q = quad::adaptive_panels(inner, br, rel);
  const double w = std::sinh(r) * weight_at(opt, r);
  return {w * q.value, w * q.abs_error};
}

IntegralResult shell_impl(const KernelField& f, const IntegrateOptions& opt, bool parallel) {
  const GroupDescriptor& g = f.descriptor;
  if (!g.is_abelian() || g.Q > 2)
    throw UnsupportedRegime("shell integration: abelian Q <= 2 only (use monte_carlo)");
  f.quadrature.validate();
  const double R = truncation_radius(f, opt);
  const auto breaks = radial_breaks(R, f.time_scale);
  const quad::NodeSet nodes = quad::composite_nodes(breaks, f.quadrature.nodes_per_dim);
  const std::size_t n = nodes.size();
  std::vector<ShellValue> vals(n);
  const long long nn = static_cast<long long>(n);
  if (parallel) {
#pragma omp parallel for schedule(dynamic, 4) num_threads(worker_threads())
    for (long long i = 0; i < nn; ++i) vals[i] = shell_value(f, opt, nodes.x[i]);
  } else {
    for (long long i = 0; i < nn; ++i) vals[i] = shell_value(f, opt, nodes.x[i]);
  }
  // fixed-order reduction keeps results bit-identical across thread counts
  IntegralResult res;
  res.radius = R;
  double outer = 0.0, err = 0.0, total = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double c = nodes.w[i] * vals[i].value;
    total += c;
    err += nodes.w[i] * vals[i].err;
    if (nodes.x[i] > 0.9 * R) outer += c;
  }
  res.value = total;
  res.outer_fraction = total != 0 ? std::abs(outer / total) : 0.0;
  res.est_abs_error = err + std::abs(outer);
  res.trusted = std::isfinite(total) && res.outer_fraction <= std::max(1e-6, f.quadrature.rel_tol);
  if (!res.trusted)
    res.diagnosis = "outer shells carry " + std::to_string(res.outer_fraction) +
                    " of the integral; weight growth outruns decay at the truncation radius";
  return res;
}

}  // namespace

int worker_threads() {
  int n = omp_get_max_threads();
  if (const char* env = std::getenv("NA_HEAT_THREADS")) {
    const int cap = std::atoi(env);
    if (cap > 0) n = std::min(n, cap);
  }
  return std::max(1, n);
}

double auto_radius(double t, int Q, double weight_rate) {
  const double a = 0.5 * Q + weight_rate;
  // sinh r overflows past ~710; beyond the cap the outer_fraction diagnostic takes over
  return std::min(700.0, 2.0 * t * a + 2.0 * std::sqrt(t * kLogDrop) + 2.0);
}

IntegralResult integrate_shell(const KernelField& f, const IntegrateOptions& opt) {
  return shell_impl(f, opt, opt.parallel);
}

IntegralResult integrate_shell_serial(const KernelField& f, const IntegrateOptions& opt) {
  return shell_impl(f, opt, false);
}

IntegralResult integrate_tensor(const KernelField& f, const IntegrateOptions& opt) {
  const GroupDescriptor& g = f.descriptor;
  if (!g.is_abelian() || g.Q != 1) throw UnsupportedRegime("tensor_gauss: abelian Q = 1 only");
  f.quadrature.validate();
  const double R = std::min(truncation_radius(f, opt), f.quadrature.u_halfwidth);
  const double cR = std::cosh(R);
  // z = e^{u/2} sqrt2 sinh(eta): cosh|x|_d = cosh u + sinh^2 eta, dz du = e^{u/2} sqrt2 cosh(eta) deta du
  const double H = std::asinh(std::sqrt(cR));
  const double w0 = 0.5 * std::min(1.0, std::sqrt(f.time_scale));
  const int order = f.quadrature.nodes_per_dim;
  const auto un = quad::composite_nodes(quad::panel_breaks(-R, R, w0), order);
  const auto en = quad::composite_nodes(quad::panel_breaks(-H, H, w0), order);
  std::vector<double> rows(un.size());
  const long long nu = static_cast<long long>(un.size());
#pragma omp parallel for schedule(dynamic, 4) num_threads(opt.parallel ? worker_threads() : 1)
  for (long long i = 0; i < nu; ++i) {
    const double u = un.x[i];
    const double eu2 = std::exp(0.5 * u);
    double s = 0.0;
    PointG x{PointN(1), u};
    for (std::size_t k = 0; k < en.size(); ++k) {
      const double eta = en.x[k];
      const double sh = std::sinh(eta);
      const double c = std::cosh(u) + sh * sh;
      if (c > cR) continue;
      x.z[0] = eu2 * std::numbers::sqrt2 * sh;
      const double r = std::acosh(std::max(c, 1.0));
      s += en.w[k] * std::numbers::sqrt2 * std::cosh(eta) * reduce(opt, f.evaluate(x)) * weight_at(opt, r);
    }
    rows[i] = un.w[i] * eu2 * s;
  }
  IntegralResult res;
  res.radius = R;
  for (double v : rows) res.value += v;
  res.est_abs_error = std::abs(res.value) * f.quadrature.rel_tol;
  res.trusted = std::isfinite(res.value);
  return res;
}

IntegralResult integrate_monte_carlo(const KernelField& f, const IntegrateOptions& opt) {
  const GroupDescriptor& g = f.descriptor;
  f.quadrature.validate();
  const double t = f.time_scale;
  const double su = 1.0 + 2.0 * std::sqrt(t) + 0.5 * g.Q * t;
  const double sz = 1.5 * (1.0 + std::sqrt(t));
  const std::size_t n = f.quadrature.n_samples;
  constexpr std::size_t kChunk = 4096;
  const std::size_t chunks = (n + kChunk - 1) / kChunk;
  std::vector<double> sum(chunks), sum2(chunks);
  const long long nc = static_cast<long long>(chunks);
#pragma omp parallel for schedule(dynamic, 1) num_threads(opt.parallel ? worker_threads() : 1)
  for (long long c = 0; c < nc; ++c) {
    // one generator per chunk, seeded from (seed, chunk): independent of scheduling
    std::seed_seq seq{static_cast<std::uint64_t>(f.quadrature.seed), static_cast<std::uint64_t>(c)};
    std::mt19937_64 rng(seq);
    std::normal_distribution<double> nd(0.0, 1.0);
    // Student t in z: the kernels mix Gaussians of all widths over xi, so z tails are heavier
    std::student_t_distribution<double> td(kStudentNu);
    double s = 0.0, s2 = 0.0;
    const std::size_t lo = static_cast<std::size_t>(c) * kChunk;
    const std::size_t hi = std::min(n, lo + kChunk);
    PointG x{PointN(g.dim()), 0.0};
    for (std::size_t i = lo; i < hi; ++i) {
      const double a = nd(rng);
      const double u = su * a;
      double logp = -0.5 * a * a - std::log(su * std::sqrt(2 * kPi));
      double jac_log = 0.0;
      for (int k = 0; k < g.dim(); ++k) {
        const double b = td(rng);
        const double w = g.dilation_weights[k];
        x.z[k] = std::exp(0.5 * w * u) * sz * b;
        logp += student_log_density(b) - std::log(sz);
        jac_log += 0.5 * w * u;
      }
      x.u = u;
      double v = reduce(opt, f.evaluate(x));
      if (opt.radial_weight) v *= opt.radial_weight(g_distance(x, g));
      const double est = v * std::exp(jac_log - logp);
      s += est;
      s2 += est * est;
    }
    sum[c] = s;
    sum2[c] = s2;
  }
  double s = 0.0, s2 = 0.0;
  for (std::size_t c = 0; c < chunks; ++c) {
    s += sum[c];
    s2 += sum2[c];
  }
  const double mean = s / static_cast<double>(n);
  const double var = std::max(0.0, s2 / static_cast<double>(n) - mean * mean);
  IntegralResult res;
  res.value = mean;
  res.est_abs_error = 3.0 * std::sqrt(var / static_cast<double>(n));
  res.trusted = std::isfinite(mean);
  return res;
}

IntegralResult integrate(const KernelField& f, const IntegrateOptions& opt) {
  switch (f.quadrature.method) {
    case QuadMethod::tensor_gauss: return integrate_tensor(f, opt);
    case QuadMethod::monte_carlo: return integrate_monte_carlo(f, opt);
    case QuadMethod::adaptive: break;
  }
  return integrate_shell(f, opt);
}

}  // namespace naheat
