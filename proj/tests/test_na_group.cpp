#include "doctest.h"

#include "naheat/heat_kernel.hpp"
#include "naheat/integrate.hpp"
#include "naheat/na_group.hpp"

#include <cmath>
#include <numbers>
#include <random>

using namespace naheat;

namespace {

constexpr double kPi = std::numbers::pi;

std::vector<PointG> sample(const GroupDescriptor& g, int n, unsigned seed, double zr = 3, double ur = 2) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> dz(-zr, zr), du(-ur, ur);
  std::vector<PointG> v;
  for (int i = 0; i < n; ++i) {
    PointG x{PointN(g.dim()), du(rng)};
    for (int k = 0; k < g.dim(); ++k) x.z[k] = dz(rng);
    v.push_back(x);
  }
  return v;
}

KernelField field_of(std::function<double(const PointG&)> f, const GroupDescriptor& g, double ts = 1.0) {
  KernelField k;
  k.evaluate = std::move(f);
  k.descriptor = g;
  k.time_scale = ts;
  return k;
}

double l1(const KernelField& f, Reduce r = Reduce::absolute) {
  IntegrateOptions o;
  o.reduce = r;
  return integrate(f, o).value;
}

}  // namespace

TEST_CASE("group law on G") {
  const auto g = GroupDescriptor::abelian(1);
  const PointG inv = g_inverse(PointG{PointN{3.0}, 1.0}, g);
  CHECK(inv.z[0] == doctest::Approx(-3.0 / std::exp(1.0)));
  CHECK(inv.u == -1.0);
  for (const auto& G : {GroupDescriptor::abelian(1), GroupDescriptor::abelian(2), GroupDescriptor::heisenberg()}) {
    auto p = sample(G, 60, 3);
    for (int i = 0; i + 1 < 60; i += 2) {
      const PointG& x = p[i];
      const PointG& y = p[i + 1];
      const PointG xx = g_inverse(g_inverse(x, G), G);
      for (int k = 0; k < G.dim(); ++k) CHECK(xx.z[k] == doctest::Approx(x.z[k]).epsilon(1e-12));
      CHECK(modular(g_multiply(x, y, G), G) == doctest::Approx(modular(x, G) * modular(y, G)).epsilon(1e-12));
      CHECK(g_distance(g_inverse(x, G), G) == doctest::Approx(g_distance(x, G)).epsilon(1e-12));
    }
  }
  PointG ln2{PointN{0.0}, std::log(2.0)};
  CHECK(modular(ln2, g) == doctest::Approx(0.5));
  CHECK(modular(g_identity(g), g) == 1.0);
}

TEST_CASE("distance: half-plane and half-space oracles") {
  for (int Q : {1, 2}) {
    const auto g = GroupDescriptor::abelian(Q);
    auto p = sample(g, 2000, 5);
    double worst = 0.0;
    for (int i = 0; i + 1 < 2000; i += 2) {
      // (z, u) -> (z, e^u) in the upper half space, an isometry onto hyperbolic space
      const PointG& x = p[i];
      const PointG& y = p[i + 1];
      double d2 = std::pow(std::exp(x.u) - std::exp(y.u), 2);
      for (int k = 0; k < Q; ++k) d2 += std::pow(x.z[k] - y.z[k], 2);
      const double oracle = std::acosh(1 + d2 / (2 * std::exp(x.u + y.u)));
      worst = std::max(worst, std::abs(g_distance(x, y, g) - oracle));
    }
    CHECK(worst < 1e-12);
  }
  const auto g = GroupDescriptor::abelian(1);
  CHECK(g_distance(PointG{PointN{0.0}, -1.7}, g) == doctest::Approx(1.7));
  CHECK(g_distance(PointG{PointN{2.0}, 0.0}, g) == doctest::Approx(1.7627471740390861));
}

TEST_CASE("distance on the Heisenberg extension uses the CC norm") {
  const auto g = GroupDescriptor::heisenberg();
  PointN z{0.4, 0.3, 0.9};
  const double n = n_norm(z, g);
  CHECK(g_distance(PointG{z, 0.0}, g) == doctest::Approx(std::acosh(1 + n * n / 2)).epsilon(1e-12));
  CHECK(g_distance(PointG{z, 0.8}, g) ==
        doctest::Approx(std::acosh(std::cosh(0.8) + std::exp(-0.8) * n * n / 2)).epsilon(1e-12));
}

TEST_CASE("triangle inequality") {
  for (const auto& g : {GroupDescriptor::abelian(1), GroupDescriptor::heisenberg()}) {
    auto p = sample(g, 300, 9);
    for (int i = 0; i + 2 < 300; i += 3)
      CHECK(g_distance(p[i], p[i + 2], g) <= g_distance(p[i], p[i + 1], g) + g_distance(p[i + 1], p[i + 2], g) + 1e-12);
  }
}

TEST_CASE("involution") {
  const auto g = GroupDescriptor::abelian(1);
  auto f = field_of([](const PointG& x) { return std::exp(-x.u * x.u - (x.z[0] - 0.5) * (x.z[0] - 0.5)) * (1 + x.z[0]); }, g);
  const KernelField ff = involution(involution(f));
  for (const auto& x : sample(g, 40, 1, 2, 1.5)) CHECK(ff(x) == doctest::Approx(f(x)).epsilon(1e-12));
  CHECK(l1(involution(f)) == doctest::Approx(l1(f)).epsilon(1e-7));
  // heat kernel is self-adjoint
  const KernelField H = heat_field({}, 1.0, g);
  const KernelField Hs = involution(H);
  for (const auto& x : sample(g, 20, 2, 2, 1.5)) CHECK(Hs(x) == doctest::Approx(H(x)).epsilon(1e-6));
}

TEST_CASE("right Haar measure: right invariance, left translation scales by m") {
  const auto g = GroupDescriptor::abelian(1);
  auto f = field_of([](const PointG& x) { return std::exp(-x.u * x.u - x.z[0] * x.z[0]); }, g);
  const double I = l1(f, Reduce::signed_value);
  const PointG y{PointN{0.7}, 0.4};
  // x -> f(x y)
  CHECK(l1(right_translate(f, y), Reduce::signed_value) == doctest::Approx(I).epsilon(1e-7));
  // x -> f(y x) integrates to m(y) Int f
  auto left = field_of([&](const PointG& x) { return f(g_multiply(y, x, g)); }, g);
  CHECK(l1(left, Reduce::signed_value) == doctest::Approx(modular(y, g) * I).epsilon(1e-7));
  CHECK(modular(y, g) != doctest::Approx(1.0));
}

TEST_CASE("right translation bound") {
  // ||R_y f - f||_1 <= |y|_d || |grad_H f| ||_1, for a cheap smooth f with exact frame derivatives
  const auto g = GroupDescriptor::abelian(1);
  auto f = field_of([](const PointG& x) { return std::exp(-x.u * x.u - x.z[0] * x.z[0]); }, g);
  auto grad = field_of([&](const PointG& x) {
    const double v = f(x);
    return std::hypot(2 * x.u * v, std::exp(x.u) * 2 * x.z[0] * v);
  }, g);
  const double G = l1(grad);
  for (const auto& y : sample(g, 4, 17, 1.0, 1.0)) {
    const KernelField Ry = right_translate(f, y);
    auto diff = field_of([&](const PointG& x) { return Ry(x) - f(x); }, g);
    const double lhs = l1(diff);
    CHECK(lhs > 0);
    CHECK(lhs <= g_distance(y, g) * G * (1 + 1e-6));
  }
}

TEST_CASE("horizontal gradient") {
  const auto g = GroupDescriptor::abelian(1);
  auto u = field_of([](const PointG& x) { return x.u; }, g);
  auto c = field_of([](const PointG&) { return 3.0; }, g);
  PointG x{PointN{0.3}, -0.4};
  CHECK(horizontal_gradient_norm(u, x) == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(horizontal_gradient_norm(c, x) == doctest::Approx(0.0));
  // X_1 z = e^u
  auto z = field_of([](const PointG& p) { return p.z[0]; }, g);
  CHECK(frame_derivative_fd(z.evaluate, 1, x, g) == doctest::Approx(std::exp(-0.4)).epsilon(1e-9));
  const KernelField H = heat_field({}, 1.0, g);
  const auto grads = gradient_fields({}, 1.0, g);
  for (const auto& p : sample(g, 20, 4, 2, 1.5))
    CHECK(horizontal_gradient_norm(H, p, &grads) == doctest::Approx(horizontal_gradient_norm(H, p)).epsilon(1e-5));
}

TEST_CASE("radial density and C_N") {
  const auto g = GroupDescriptor::abelian(1);
  CHECK(radial_integral([](double) { return 0.0; }, 5.0, g) == 0.0);
  // hyperbolic plane: area of a disc is 2 pi (cosh R - 1)
  CHECK(estimate_CN(g) == doctest::Approx(2 * kPi).epsilon(1e-8));
  CHECK(estimate_CN(GroupDescriptor::abelian(2)) == doctest::Approx(4 * kPi).epsilon(1e-8));
  for (double R : {1.0, 2.0, 3.0}) CHECK(ball_volume_direct(R, g) == doctest::Approx(2 * kPi * (std::cosh(R) - 1)).epsilon(1e-3));
  CHECK(ball_volume_direct(1.5, GroupDescriptor::abelian(2)) ==
        doctest::Approx(kPi * (std::sinh(3.0) - 3.0)).epsilon(1e-3));
  // same constant for two profiles, direct 2D quadrature against the radial form
  for (double a : {1.0, 2.0}) {
    auto f = field_of([&](const PointG& x) { const double r = g_distance(x, g); return std::exp(-a * r * r); }, g);
    f.quadrature.d_radius = 8.0;
    IntegrateOptions o;
    const double direct = integrate_tensor(f, o).value;
    const double radial = radial_integral([&](double r) { return std::exp(-a * r * r); }, 8.0, g);
    CHECK(direct == doctest::Approx(radial).epsilon(1e-4));
  }
}

TEST_CASE("convolution") {
  const auto g = GroupDescriptor::abelian(1);
  const KernelField a = heat_field({}, 0.5, g), b = heat_field({}, 0.75, g);
  const PointG x{PointN{0.2}, 0.1};
  CHECK(convolve_at(a, b, x).value == doctest::Approx(h(1.25, x, g).value).epsilon(1e-4));
  // approximate identity: h_eps * f -> f, improving as eps shrinks
  auto f = field_of([](const PointG& p) { return std::exp(-p.u * p.u - p.z[0] * p.z[0]); }, g);
  double prev = 1e300;
  for (double eps : {0.2, 0.05, 0.0125}) {
    const double err = std::abs(convolve_at(f, heat_field({}, eps, g), x).value - f(x));
    CHECK(err < prev);
    prev = err;
  }
  // brute-force midpoint sum of Int f(x y^{-1}) f(y) dz du
  auto bump = field_of([](const PointG& p) { return std::exp(-2 * (p.u * p.u + p.z[0] * p.z[0])); }, g);
  double s = 0.0;
  const int n = 600;
  const double L = 4.0, hh = 2 * L / n;
  for (int i = 0; i < n; ++i)
    for (int k = 0; k < n; ++k) {
      const PointG y{PointN{-L + (i + 0.5) * hh}, -L + (k + 0.5) * hh};
      s += bump(g_multiply(x, g_inverse(y, g), g)) * bump(y);
    }
  CHECK(convolve_at(bump, bump, x).value == doctest::Approx(s * hh * hh).epsilon(1e-3));
}
