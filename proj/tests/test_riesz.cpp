#include "doctest.h"

#include "naheat/estimator.hpp"
#include "naheat/heat_kernel.hpp"
#include "naheat/quadrature.hpp"
#include "naheat/riesz.hpp"

#include <cmath>
#include <random>
#include <vector>

using namespace naheat;

namespace {

const GroupDescriptor& q1() {
  static const GroupDescriptor g = GroupDescriptor::parse("abelian:1");
  return g;
}

std::vector<PointG> test_points(int n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> d(-2.0, 2.0);
  std::vector<PointG> xs;
  for (int i = 0; i < n; ++i) xs.push_back(PointG{PointN{d(rng)}, d(rng)});
  return xs;
}

// Int_a^b f(t) dt in log t
double log_time_integral(const std::function<double(double)>& f, double a, double b, double rel) {
  auto g = [&](double s) {
    const double t = std::exp(s);
    return t * f(t);
  };
  return quad::adaptive(g, std::log(a), std::log(b), rel, 1e-300, 4000).value;
}

// Int_b^inf f from a power law through f(b/2) and f(b)
double power_tail(const std::function<double(double)>& f, double b) {
  const double f1 = f(0.5 * b), f2 = f(b);
  if (f1 == 0 || f2 == 0 || (f1 > 0) != (f2 > 0)) return 0.0;
  const double p = std::log(f1 / f2) / std::log(2.0);
  REQUIRE(p > 1.0);
  return f2 * b / (p - 1);
}

}  // namespace

TEST_CASE("dyadic kernels: linearity in Y") {
  const DyadicKernel a = dyadic_kernel_first(1, {0.0, 1.0}, q1());
  const DyadicKernel b = dyadic_kernel_first(1, {0.0, 2.5}, q1());
  const DyadicKernel c = dyadic_kernel_first(1, {1.0, 0.0}, q1());
  const DyadicKernel s = dyadic_kernel_first(1, {1.0, 2.5}, q1());
  for (const PointG& x : test_points(10, 1)) {
    CHECK(b.field(x) == doctest::Approx(2.5 * a.field(x)).epsilon(1e-14));
    CHECK(s.field(x) == doctest::Approx(c.field(x) + 2.5 * a.field(x)).epsilon(1e-12).scale(1e-14));
  }
}

TEST_CASE("dyadic kernels against independent time quadrature") {
  // first order, n = 0: 128 Gauss-Legendre nodes in t over [1, 2]
  const DyadicKernel k0 = dyadic_kernel(0, KernelOrder::first, 1, 1, q1());
  for (const PointG& x : test_points(5, 2)) {
    auto f = [&](double t) { return h_derivative(1, t, x, q1()).value / std::sqrt(t); };
    const double want = quad::composite_gauss(f, 1.0, 2.0, 4, 32);
    CHECK(k0.field(x) == doctest::Approx(want).epsilon(1e-6).scale(1e-12));
  }
  // telescoping: n = 0..3 against Int_1^16
  std::vector<DyadicKernel> ks;
  for (int n = 0; n <= 3; ++n) ks.push_back(dyadic_kernel(n, KernelOrder::first, 1, 1, q1()));
  for (const PointG& x : test_points(5, 3)) {
    double sum = 0.0;
    for (const auto& k : ks) sum += k.field(x);
    auto f = [&](double t) { return h_derivative(1, t, x, q1()).value / std::sqrt(t); };
    CHECK(sum == doctest::Approx(log_time_integral(f, 1.0, 16.0, 1e-10)).epsilon(1e-6).scale(1e-12));
  }
  // second order, small t (n < 0): Int_{1/8}^{1} X_1 (X_1 h_t)^* dt
  std::vector<DyadicKernel> ss;
  for (int n = -3; n <= -1; ++n) ss.push_back(dyadic_kernel(n, KernelOrder::second, 1, 1, q1()));
  for (const PointG& x : test_points(5, 4)) {
    double sum = 0.0;
    for (const auto& k : ss) sum += k.field(x);
    auto f = [&](double t) { return h_word({1, kStar, 1}, t, x, q1()).value; };
    CHECK(sum == doctest::Approx(log_time_integral(f, 0.125, 1.0, 1e-10)).epsilon(1e-6).scale(1e-12));
  }
}

TEST_CASE("size at scale 0 and homogeneity") {
  const DyadicKernel k = dyadic_kernel(1, KernelOrder::first, 1, 1, q1());
  const double size0 = cz_size_value(k, 0.0).value;
  CHECK(size0 == doctest::Approx(weighted_l1(k.field, 0.0, 2.0)).epsilon(1e-8));
  const DyadicKernel k2 = dyadic_kernel_first(1, {0.0, 2.0}, q1());
  CHECK(cz_size_value(k2, 0.0).value == doctest::Approx(2 * size0).epsilon(1e-12));
}

TEST_CASE("star gradient against differences of k^*") {
  for (const DyadicKernel& k :
       {dyadic_kernel(0, KernelOrder::first, 1, 1, q1()), dyadic_kernel(-2, KernelOrder::second, 1, 1, q1())}) {
    const KernelField ks = involution(k.field);
    const auto grad = dyadic_star_gradient(k);
    const KernelField norm = dyadic_star_gradient_norm(k);
    for (const PointG& x : test_points(5, 5)) {
      double n2 = 0.0;
      for (int i = 0; i <= 1; ++i) {
        const double fd = frame_derivative_fd(ks.evaluate, i, x, q1(), 1e-4);
        CHECK(grad[i](x) == doctest::Approx(fd).epsilon(1e-3).scale(1e-8));
        n2 += grad[i](x) * grad[i](x);
      }
      CHECK(norm(x) == doctest::Approx(std::sqrt(n2)).epsilon(1e-12));
    }
  }
}

TEST_CASE("tail kernel structure") {
  CHECK(tail_kernel(1, 1, q1()).case_tag == TailCase::I);
  CHECK(tail_kernel(1, 0, q1()).case_tag == TailCase::II);
  CHECK(tail_kernel(0, 1, q1()).case_tag == TailCase::III);
  CHECK(tail_kernel(0, 0, q1()).case_tag == TailCase::IV);
  const TailKernel two = tail_kernel(1, 0, q1(), 16.0);
  const TailKernel three = tail_kernel(0, 1, q1(), 16.0);
  const TailKernel four = tail_kernel(0, 0, q1(), 16.0);
  for (const PointG& x : test_points(10, 6)) {
    const double inv = modular(x, q1()) * two.field(g_inverse(x, q1()));
    CHECK(three.field(x) == doctest::Approx(inv).epsilon(1e-12).scale(1e-14));
    for (const TailKernel* k : {&two, &four}) {
      double s = 0.0;
      for (const auto& p : k->parts) s += p.multiplicity * p.field(x);
      CHECK(k->field(x) == doctest::Approx(s).epsilon(1e-12).scale(1e-14));
    }
  }
  CHECK_THROWS(tail_kernel(2, 0, q1()));
}

TEST_CASE("case I partial time integrals are Cauchy") {
  for (const PointG& x : test_points(3, 7)) {
    std::vector<double> v;
    for (double T : {32.0, 64.0, 128.0, 256.0}) v.push_back(tail_kernel(1, 1, q1(), T).field(x));
    const double d1 = v[1] - v[0], d2 = v[2] - v[1], d3 = v[3] - v[2];
    // t^{-3/2} integrand: each doubling adds about 2^{-1/2} of the previous increment
    CHECK(std::abs(d2) <= 0.8 * std::abs(d1));
    CHECK(std::abs(d3) <= 0.8 * std::abs(d2));
  }
}

TEST_CASE("cases II and IV against brute-force time quadrature") {
  // field = Int_1^inf raw_t - Int_T^inf (Psi parts)_t, the T1 parts being integrated to infinity
  const double T = 16.0, Tb = 2048.0;
  for (auto [j, l] : {std::pair{1, 0}, std::pair{0, 0}}) {
    const TailKernel k = tail_kernel(j, l, q1(), T);
    const auto parts = route_a_parts(k.word, 1);
    std::vector<std::string> psi_names;
    for (const auto& p : parts) {
      bool psi = true;
      for (const auto& a : p.atoms) psi = psi && a.weight == Weight::Psi;
      if (psi) psi_names.push_back(p.name);
    }
    REQUIRE(!psi_names.empty());
    for (const PointG& x : test_points(10, 8)) {
      auto raw = [&](double t) { return h_word(k.word, t, x, q1()).value; };
      auto psi = [&](double t) { return route_a_field(parts, weight_rules(t), q1(), t, psi_names)(x); };
      const double full = log_time_integral(raw, 1.0, Tb, 1e-8) + power_tail(raw, Tb);
      const double cut = log_time_integral(psi, T, Tb, 1e-8) + power_tail(psi, Tb);
      CAPTURE(j);
      CAPTURE(l);
      CHECK(k.field(x) == doctest::Approx(full - cut).epsilon(1e-3).scale(1e-6));
    }
  }
}
