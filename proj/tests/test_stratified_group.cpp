#include "doctest.h"

#include "naheat/stratified_group.hpp"

#include <array>
#include <cmath>
#include <numbers>
#include <random>

using namespace naheat;

namespace {

// geodesic from the origin with unit horizontal speed and curvature lambda, integrated with RK4
// in the coordinates of the group law: x' = cos, y' = sin, w' = (x y' - y x') / 2
PointN shoot(double theta, double lambda, double L, int steps = 4000) {
  std::array<double, 3> s{0, 0, 0};
  auto rhs = [&](double t, const std::array<double, 3>& v) {
    const double a = theta + lambda * t;
    const double dx = std::cos(a), dy = std::sin(a);
    return std::array<double, 3>{dx, dy, 0.5 * (v[0] * dy - v[1] * dx)};
  };
  const double h = L / steps;
  for (int i = 0; i < steps; ++i) {
    const double t = i * h;
    auto k1 = rhs(t, s);
    std::array<double, 3> tmp;
    for (int k = 0; k < 3; ++k) tmp[k] = s[k] + 0.5 * h * k1[k];
    auto k2 = rhs(t + 0.5 * h, tmp);
    for (int k = 0; k < 3; ++k) tmp[k] = s[k] + 0.5 * h * k2[k];
    auto k3 = rhs(t + 0.5 * h, tmp);
    for (int k = 0; k < 3; ++k) tmp[k] = s[k] + h * k3[k];
    auto k4 = rhs(t + h, tmp);
    for (int k = 0; k < 3; ++k) s[k] += h / 6 * (k1[k] + 2 * k2[k] + 2 * k3[k] + k4[k]);
  }
  return PointN{s[0], s[1], s[2]};
}

}  // namespace

TEST_CASE("descriptor parsing") {
  CHECK(GroupDescriptor::parse("abelian:2") == GroupDescriptor::abelian(2));
  CHECK(GroupDescriptor::parse("heisenberg").Q == 4);
  CHECK_THROWS_AS(GroupDescriptor::parse("abelian:0"), InvalidArgument);
  CHECK_THROWS_AS(GroupDescriptor::parse("nilpotent"), InvalidArgument);
}

TEST_CASE("Heisenberg group law") {
  const auto g = GroupDescriptor::heisenberg();
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> d(-2, 2);
  for (int i = 0; i < 50; ++i) {
    PointN a{d(rng), d(rng), d(rng)}, b{d(rng), d(rng), d(rng)}, c{d(rng), d(rng), d(rng)};
    const PointN l = n_multiply(n_multiply(a, b, g), c, g), r = n_multiply(a, n_multiply(b, c, g), g);
    for (int k = 0; k < 3; ++k) CHECK(l[k] == doctest::Approx(r[k]).epsilon(1e-13));
    const PointN e = n_multiply(a, n_inverse(a, g), g);
    for (int k = 0; k < 3; ++k) CHECK(std::abs(e[k]) < 1e-15);
    // dilations are automorphisms
    const double t = 0.3 + std::abs(d(rng));
    const PointN x = dilate(t, n_multiply(a, b, g), g), y = n_multiply(dilate(t, a, g), dilate(t, b, g), g);
    for (int k = 0; k < 3; ++k) CHECK(x[k] == doctest::Approx(y[k]).epsilon(1e-13));
  }
}

TEST_CASE("CC norm against RK4 geodesic shooting") {
  const auto g = GroupDescriptor::heisenberg();
  for (double theta : {0.0, 0.7, 2.1})
    for (double lambda : {0.2, 1.0, 2.5})
      for (double L : {0.5, 1.0, 2.0}) {
        if (lambda * L >= 2 * std::numbers::pi - 0.3) continue;  // stays minimizing before 2 pi
        const PointN z = shoot(theta, lambda, L);
        CHECK(n_norm(z, g) == doctest::Approx(L).epsilon(1e-9));
      }
  // straight lines and the vertical axis
  CHECK(n_norm(PointN{3.0, 4.0, 0.0}, g) == doctest::Approx(5.0));
  CHECK(n_norm(PointN{0.0, 0.0, 1.0}, g) == doctest::Approx(std::sqrt(4 * std::numbers::pi)));
}

TEST_CASE("CC norm is homogeneous and symmetric") {
  const auto g = GroupDescriptor::heisenberg();
  PointN z{0.4, -0.9, 0.7};
  CHECK(n_norm(dilate(2.5, z, g), g) == doctest::Approx(2.5 * n_norm(z, g)).epsilon(1e-12));
  CHECK(n_norm(n_inverse(z, g), g) == doctest::Approx(n_norm(z, g)).epsilon(1e-12));
}

TEST_CASE("heat equation residual on N") {
  for (const auto& g : {GroupDescriptor::abelian(1), GroupDescriptor::abelian(2), GroupDescriptor::heisenberg()}) {
    CAPTURE(g.name());
    const double s = 0.7, hs = 1e-4, hx = 1e-3;
    PointN z(g.dim());
    for (int k = 0; k < g.dim(); ++k) z[k] = 0.3 + 0.2 * k;
    const double dt = (n_heat(s + hs, z, g) - n_heat(s - hs, z, g)) / (2 * hs);
    double lap = 0.0;
    for (int j = 1; j <= g.q; ++j) {
      auto first = [&](const PointN& p) {
        return n_field_fd([&](const PointN& r) { return n_heat(s, r, g); }, j, p, g, hx);
      };
      lap += n_field_fd(first, j, z, g, hx);
    }
    CHECK(dt == doctest::Approx(lap).epsilon(1e-4));
  }
}

TEST_CASE("heat kernel on N: mass and homogeneity") {
  const auto g = GroupDescriptor::heisenberg();
  CHECK(n_weighted_l1({}, {}, 0.0, 1.0, g) == doctest::Approx(1.0).epsilon(1e-6));
  // h_s(z) = s^{-Q/2} h_1(delta_{s^{-1/2}} z)
  PointN z{0.5, -0.2, 0.8};
  for (double s : {0.25, 4.0})
    CHECK(n_heat(s, z, g) == doctest::Approx(std::pow(s, -2.0) * n_heat(1.0, dilate(1 / std::sqrt(s), z, g), g)).epsilon(1e-9));
  // abelian closed form
  const auto a = GroupDescriptor::abelian(1);
  CHECK(n_heat(2.0, PointN{1.0}, a) == doctest::Approx(std::exp(-1.0 / 8) / std::sqrt(8 * std::numbers::pi)));
}

TEST_CASE("derivatives of the N heat kernel") {
  const auto g = GroupDescriptor::abelian(2);
  PointN z{0.3, -0.4};
  auto H = [&](const PointN& p) { return n_heat(1.0, p, g); };
  CHECK(n_heat_derivative({1}, {}, 1.0, z, g) == doctest::Approx(n_field_fd(H, 1, z, g, 1e-5)).epsilon(1e-7));
  // (X_j h)^*(z) = X_j h(z^{-1}) on N, so for the even Gaussian it flips sign
  CHECK(n_heat_derivative({}, {2}, 1.0, z, g) == doctest::Approx(-n_heat_derivative({2}, {}, 1.0, z, g)).epsilon(1e-7));
  CHECK_THROWS_AS(n_heat_derivative({3}, {}, 1.0, z, g), InvalidArgument);
  CHECK_THROWS_AS(n_heat_derivative({1, 1}, {1, 2}, 1.0, z, g), InvalidArgument);
}
