#include "naheat/stratified_group.hpp"

#include "naheat/quadrature.hpp"

#include <algorithm>
#include <functional>
#include <cmath>
#include <numbers>

namespace naheat {

namespace {

constexpr double kPi = std::numbers::pi;

void check_dims(const PointN& z, const GroupDescriptor& g) {
  if (z.size() != g.dim())
    throw InvalidArgument("point has dimension " + std::to_string(z.size()) + ", group " +
                          g.name() + " needs " + std::to_string(g.dim()));
}

// mu(phi) = (phi - sin phi cos phi) / (4 sin^2 phi), increasing from 0 to +inf on [0, pi)
double geodesic_mu(double phi) {
  if (phi < 1e-4) return phi / 6.0 + phi * phi * phi / 90.0;
  const double s = std::sin(phi);
  return (phi - s * std::cos(phi)) / (4.0 * s * s);
}

double geodesic_mu_prime(double phi) {
  if (phi < 1e-4) return 1.0 / 6.0 + phi * phi / 30.0;
  const double s = std::sin(phi), c = std::cos(phi);
  // d/dphi of (phi - s c)/(4 s^2): numerator derivative 2 s^2
  return (2.0 * s * s * 4.0 * s * s - (phi - s * c) * 8.0 * s * c) / (16.0 * s * s * s * s);
}

double heisenberg_norm(double x, double y, double w) {
  const double rho2 = x * x + y * y;
  const double aw = std::abs(w);
  if (aw == 0.0) return std::sqrt(rho2);
  if (rho2 == 0.0) return std::sqrt(4.0 * kPi * aw);
  const double target = aw / rho2;
  // bracket the root in [0, pi) then safeguarded Newton
  double lo = 0.0, hi = kPi;
  double phi = std::min(6.0 * target, 0.5 * kPi);
  if (geodesic_mu(phi) > target) hi = phi; else lo = phi;
  for (int it = 0; it < 200; ++it) {
    const double f = geodesic_mu(phi) - target;
    if (f > 0) hi = phi; else lo = phi;
    double next = phi - f / geodesic_mu_prime(phi);
    if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
    if (std::abs(next - phi) <= 1e-15 * std::max(1.0, phi) || hi - lo < 1e-15) {
      phi = next;
      break;
    }
    phi = next;
  }
  const double s = std::sin(phi);
  return std::sqrt(rho2) * (phi < 1e-8 ? 1.0 : phi / s);
}

// Gaveau: h_s = 1/(8 pi^2 s^2) Int_R cos(lambda w / s) lambda/sinh(lambda)
//               exp(-lambda coth(lambda) rho^2 / (4 s)) dlambda
double gaveau(double s, double rho2, double w) {
  const double a = rho2 / (4.0 * s);
  const double b = w / s;
  auto f = [a, b](double l) {
    double r, lc;
    if (l < 1e-6) {
      r = 1.0 - l * l / 6.0;
      lc = 1.0 + l * l / 3.0;
    } else {
      r = l / std::sinh(l);
      lc = l / std::tanh(l);
    }
    return std::cos(b * l) * r * std::exp(-lc * a);
  };
  // oscillation period 2 pi / |b|; keep panels a fraction of it
  const double lmax = 60.0;
  const double width = std::min(2.0, std::abs(b) > 0 ? kPi / std::abs(b) : 2.0);
  auto breaks = quad::panel_breaks(0.0, lmax, width);
  quad::QuadResult r = quad::adaptive_panels(f, breaks, 1e-12);
  return 2.0 * r.value / (8.0 * kPi * kPi * s * s);
}

double gaussian_derivative_1d(int n, double s, double x) {
  // d^n/dx^n (4 pi s)^{-1/2} e^{-x^2/4s} = (-1)^n (2 sqrt s)^{-n} H_n(x / 2 sqrt s) e^{...}
  const double rs = 2.0 * std::sqrt(s);
  const double y = x / rs;
  const double base = std::exp(-y * y) / std::sqrt(4.0 * kPi * s);
  if (n == 0) return base;
  const double hn = std::hermite(static_cast<unsigned>(n), y);
  return ((n % 2) ? -1.0 : 1.0) * std::pow(rs, -n) * hn * base;
}

double abelian_derivative(const MultiIndex& alpha, const MultiIndex& beta, double s,
                          const PointN& z, int Q) {
  std::array<int, kMaxDim> counts{};
  for (int j : alpha) counts[j - 1]++;
  for (int j : beta) counts[j - 1]++;
  double v = (beta.size() % 2) ? -1.0 : 1.0;
  for (int i = 0; i < Q; ++i) v *= gaussian_derivative_1d(counts[i], s, z[i]);
  return v;
}

// Heisenberg: nested centred differences along left-invariant flows.
double heisenberg_derivative(const MultiIndex& alpha, const MultiIndex& beta, double s,
                             const PointN& z, const GroupDescriptor& g) {
  const std::size_t order = alpha.size() + beta.size();
  const double h = std::sqrt(s) * std::pow(1e-4, 1.0 / std::max<std::size_t>(order, 1));
  // X^beta h at a point: apply words right to left, innermost field acts first
  std::function<double(const PointN&, std::size_t)> xb = [&](const PointN& p, std::size_t k) {
    if (k == beta.size()) return n_heat(s, p, g);
    auto inner = [&](const PointN& q) { return xb(q, k + 1); };
    return n_field_fd(inner, beta[k], p, g, h);
  };
  auto star = [&](const PointN& p) { return xb(n_inverse(p, g), 0); };
  std::function<double(const PointN&, std::size_t)> xa = [&](const PointN& p, std::size_t k) {
    if (k == alpha.size()) return star(p);
    auto inner = [&](const PointN& q) { return xa(q, k + 1); };
    return n_field_fd(inner, alpha[k], p, g, h);
  };
  return xa(z, 0);
}

}  // namespace

GroupDescriptor GroupDescriptor::abelian(int Q) {
  if (Q < 1 || Q > kMaxDim) throw InvalidArgument("abelian Q must be in 1.." + std::to_string(kMaxDim));
  GroupDescriptor g;
  g.kind = GroupKind::Abelian;
  g.Q = Q;
  g.q = Q;
  g.step = 1;
  g.dilation_weights.assign(static_cast<std::size_t>(Q), 1);
  return g;
}

GroupDescriptor GroupDescriptor::heisenberg() {
  GroupDescriptor g;
  g.kind = GroupKind::Heisenberg1;
  g.Q = 4;
  g.q = 2;
  g.step = 2;
  g.dilation_weights = {1, 1, 2};
  return g;
}

GroupDescriptor GroupDescriptor::parse(const std::string& spec) {
  if (spec == "heisenberg" || spec == "heisenberg1") return heisenberg();
  const std::string prefix = "abelian:";
  if (spec.rfind(prefix, 0) == 0) {
    try {
      std::size_t used = 0;
      int Q = std::stoi(spec.substr(prefix.size()), &used);
      if (used + prefix.size() != spec.size()) throw InvalidArgument("bad group " + spec);
      return abelian(Q);
    } catch (const std::logic_error&) {
      throw InvalidArgument("bad group spec '" + spec + "'");
    }
  }
  throw InvalidArgument("unknown group '" + spec + "' (want abelian:Q or heisenberg)");
}

std::string GroupDescriptor::name() const {
  return kind == GroupKind::Abelian ? "abelian:" + std::to_string(Q) : "heisenberg";
}

PointN::PointN(std::initializer_list<double> v) : n(static_cast<int>(v.size())) {
  if (v.size() > kMaxDim) throw InvalidArgument("PointN: too many coordinates");
  std::copy(v.begin(), v.end(), c.begin());
}

double PointN::norm2() const {
  double s = 0.0;
  for (int i = 0; i < n; ++i) s += c[i] * c[i];
  return s;
}

bool PointN::operator==(const PointN& o) const {
  if (n != o.n) return false;
  for (int i = 0; i < n; ++i)
    if (c[i] != o.c[i]) return false;
  return true;
}

PointN n_zero(const GroupDescriptor& g) { return PointN(g.dim()); }

PointN n_multiply(const PointN& a, const PointN& b, const GroupDescriptor& g) {
  check_dims(a, g);
  check_dims(b, g);
  PointN r(g.dim());
  for (int i = 0; i < g.dim(); ++i) r[i] = a[i] + b[i];
  if (g.kind == GroupKind::Heisenberg1) r[2] += 0.5 * (a[0] * b[1] - a[1] * b[0]);
  return r;
}

PointN n_inverse(const PointN& a, const GroupDescriptor& g) {
  check_dims(a, g);
  PointN r(g.dim());
  for (int i = 0; i < g.dim(); ++i) r[i] = -a[i];
  return r;
}

PointN dilate(double t, const PointN& z, const GroupDescriptor& g) {
  if (!(t > 0)) throw InvalidArgument("dilate: t must be positive");
  check_dims(z, g);
  PointN r(g.dim());
  for (int i = 0; i < g.dim(); ++i) {
    const int w = g.dilation_weights[i];
    r[i] = z[i] * (w == 1 ? t : std::pow(t, w));
  }
  return r;
}

double n_norm(const PointN& z, const GroupDescriptor& g) {
  check_dims(z, g);
  if (g.is_abelian()) return std::sqrt(z.norm2());
  return heisenberg_norm(z[0], z[1], z[2]);
}

double n_heat(double s, const PointN& z, const GroupDescriptor& g) {
  if (!(s > 0)) throw InvalidArgument("n_heat: s must be positive");
  check_dims(z, g);
  if (g.is_abelian())
    return std::pow(4.0 * kPi * s, -0.5 * g.Q) * std::exp(-z.norm2() / (4.0 * s));
  return gaveau(s, z[0] * z[0] + z[1] * z[1], z[2]);
}

void check_multi_index(const MultiIndex& a, int q, bool allow_zero, std::size_t max_len) {
  if (a.size() > max_len)
    throw InvalidArgument("multi-index longer than " + std::to_string(max_len));
  for (int j : a)
    if (j < (allow_zero ? 0 : 1) || j > q)
      throw InvalidArgument("multi-index entry " + std::to_string(j) + " out of range");
}

double n_heat_derivative(const MultiIndex& alpha, const MultiIndex& beta, double s,
                         const PointN& z, const GroupDescriptor& g) {
  if (!(s > 0)) throw InvalidArgument("n_heat_derivative: s must be positive");
  check_multi_index(alpha, g.q, false);
  check_multi_index(beta, g.q, false);
  if (alpha.size() + beta.size() > 3) throw InvalidArgument("total derivative order above 3");
  check_dims(z, g);
  if (g.is_abelian()) return abelian_derivative(alpha, beta, s, z, g.Q);
  return heisenberg_derivative(alpha, beta, s, z, g);
}

namespace {

double weighted_l1_at(const MultiIndex& alpha, const MultiIndex& beta, double gamma, double s,
                      const GroupDescriptor& g) {
  const double rel = 1e-11;
  const double L = std::sqrt(s) * 24.0;
  if (g.is_abelian() && g.Q == 1) {
    auto f = [&](double x) {
      PointN z{x};
      return std::pow(std::abs(x), 2 * gamma) *
             std::abs(n_heat_derivative(alpha, beta, s, z, g));
    };
    auto br = quad::panel_breaks(0.0, L, std::sqrt(s));
    return 2.0 * quad::adaptive_panels(f, br, rel).value;
  }
  if (g.is_abelian() && g.Q == 2) {
    auto radial = [&](double r) {
      auto ang = [&](double phi) {
        PointN z{r * std::cos(phi), r * std::sin(phi)};
        return std::abs(n_heat_derivative(alpha, beta, s, z, g));
      };
      auto ab = quad::panel_breaks(0.0, 2 * kPi, kPi / 4);
      return r * std::pow(r, 2 * gamma) * quad::adaptive_panels(ang, ab, rel).value;
    };
    auto br = quad::panel_breaks(0.0, L, std::sqrt(s));
    return quad::adaptive_panels(radial, br, rel).value;
  }
  if (g.kind == GroupKind::Heisenberg1 && alpha.empty() && beta.empty()) {
    // cylindrical: 2 pi Int rho drho Int dw, kernel even in w; h_s < e^{-36} h_s(0) past
    // rho = 12 sqrt(s) or |w| = 16 s, and each sample costs a Gaveau integral
    const double Lw = s * 16.0;
    auto radial = [&](double rho) {
      auto inner = [&](double w) {
        PointN z{rho, 0.0, w};
        const double wt = gamma == 0 ? 1.0 : std::pow(n_norm(z, g), 2 * gamma);
        return wt * std::abs(n_heat(s, z, g));
      };
      auto wb = quad::panel_breaks(0.0, Lw, s);
      return rho * 2.0 * quad::adaptive_panels(inner, wb, 1e-8).value;
    };
    auto br = quad::panel_breaks(0.0, 0.5 * L, std::sqrt(s));
    return 2 * kPi * quad::adaptive_panels(radial, br, 1e-8).value;
  }
  throw UnsupportedRegime("n_weighted_l1: supported for abelian Q <= 2, and Heisenberg with empty multi-indices");
}

}  // namespace

double n_weighted_l1_direct(const MultiIndex& alpha, const MultiIndex& beta, double gamma,
                            double s, const GroupDescriptor& g) {
  if (!(s > 0)) throw InvalidArgument("n_weighted_l1: s must be positive");
  check_multi_index(alpha, g.q, false);
  check_multi_index(beta, g.q, false);
  return weighted_l1_at(alpha, beta, gamma, s, g);
}

double n_weighted_l1(const MultiIndex& alpha, const MultiIndex& beta, double gamma, double s,
                     const GroupDescriptor& g, double gamma0) {
  if (!(s > 0)) throw InvalidArgument("n_weighted_l1: s must be positive");
  if (gamma < 0 || gamma > gamma0) throw InvalidArgument("n_weighted_l1: gamma outside [0, gamma0]");
  check_multi_index(alpha, g.q, false);
  check_multi_index(beta, g.q, false);
  const double order = static_cast<double>(alpha.size() + beta.size());
  const double base = weighted_l1_at(alpha, beta, gamma, 1.0, g);
  return std::pow(s, gamma - 0.5 * order) * base;
}

}  // namespace naheat
