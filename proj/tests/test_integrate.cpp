#include "doctest.h"

#include "naheat/heat_kernel.hpp"
#include "naheat/integrate.hpp"

#include <cmath>
#include <cstdlib>
#include <numbers>

using namespace naheat;

namespace {

KernelField gaussian(const GroupDescriptor& g) {
  KernelField f;
  f.descriptor = g;
  f.evaluate = [g](const PointG& x) { const double r = g_distance(x, g); return std::exp(-r * r); };
  return f;
}

}  // namespace

TEST_CASE("parallel shell rule matches the serial reference bit for bit") {
  const auto g = GroupDescriptor::abelian(1);
  const KernelField H = heat_field({1, kStar, 1}, 2.0, g);
  IntegrateOptions o;
  const IntegralResult p = integrate_shell(H, o), s = integrate_shell_serial(H, o);
  CHECK(p.value == s.value);
  CHECK(p.est_abs_error == s.est_abs_error);
  // and independent of the thread count
  setenv("NA_HEAT_THREADS", "3", 1);
  const double three = integrate_shell(H, o).value;
  setenv("NA_HEAT_THREADS", "1", 1);
  const double one = integrate_shell(H, o).value;
  unsetenv("NA_HEAT_THREADS");
  CHECK(three == one);
  CHECK(three == p.value);
}

TEST_CASE("shell and tensor rules agree") {
  const auto g = GroupDescriptor::abelian(1);
  KernelField f = gaussian(g);
  f.quadrature.d_radius = 8.0;
  IntegrateOptions o;
  CHECK(integrate_tensor(f, o).value == doctest::Approx(integrate_shell(f, o).value).epsilon(1e-9));
  // signed, smooth and not radial
  f.evaluate = [g](const PointG& x) { const double r = g_distance(x, g); return (x.z[0] + x.u) * std::exp(-r * r); };
  o.reduce = Reduce::signed_value;
  CHECK(integrate_tensor(f, o).value == doctest::Approx(integrate_shell(f, o).value).epsilon(1e-8));
}

TEST_CASE("radial Gaussian against the coarea form") {
  for (int Q : {1, 2}) {
    const auto g = GroupDescriptor::abelian(Q);
    KernelField f = gaussian(g);
    f.quadrature.d_radius = 8.0;
    const double rad = radial_integral([](double r) { return std::exp(-r * r); }, 8.0, g);
    CHECK(integrate_shell(f, {}).value == doctest::Approx(rad).epsilon(1e-8));
  }
}

TEST_CASE("Monte Carlo: seeded, deterministic, within its error bar") {
  const auto g = GroupDescriptor::abelian(1);
  KernelField H = heat_field({}, 1.0, g);
  H.quadrature.method = QuadMethod::monte_carlo;
  H.quadrature.n_samples = 40000;
  const IntegralResult a = integrate(H), b = integrate(H);
  CHECK(a.value == b.value);
  CHECK(std::abs(a.value - 1.0) <= a.est_abs_error);
  H.quadrature.seed = 8;
  CHECK(integrate(H).value != a.value);
  // serial and parallel chunks reduce identically
  IntegrateOptions serial;
  serial.parallel = false;
  H.quadrature.seed = 7;
  CHECK(integrate_monte_carlo(H, serial).value == a.value);
}

TEST_CASE("Monte Carlo on the Heisenberg extension") {
  // heat-kernel-like shapes with closed-form integrals: with y_k = e^{-w_k u/2} z_k, dz = e^{2u} dy
  const auto g = GroupDescriptor::heisenberg();
  const double pi = std::numbers::pi;
  auto y2 = [](const PointG& x) {
    const double a = std::exp(-0.5 * x.u), b = std::exp(-x.u);
    return std::pow(a * x.z[0], 2) + std::pow(a * x.z[1], 2) + std::pow(b * x.z[2], 2);
  };
  KernelField f;
  f.descriptor = g;
  f.quadrature.method = QuadMethod::monte_carlo;
  f.quadrature.n_samples = 200000;
  f.evaluate = [&](const PointG& x) { return std::exp(-x.u * x.u / 8 - 2 * x.u - y2(x)); };
  IntegralResult r = integrate(f);
  double exact = std::pow(pi, 1.5) * std::sqrt(8 * pi);
  CHECK(std::abs(r.value - exact) <= r.est_abs_error);
  CHECK(r.est_abs_error < 0.1 * exact);
  f.evaluate = [&](const PointG& x) { return std::exp(-x.u * x.u / 8 - 2 * x.u) * std::pow(1 + y2(x), -3); };
  r = integrate(f);
  exact = pi * pi / 4 * std::sqrt(8 * pi);
  CHECK(std::abs(r.value - exact) <= r.est_abs_error);
  CHECK(r.est_abs_error < 0.1 * exact);
}

TEST_CASE("regimes and truncation") {
  CHECK(auto_radius(1e6, 1, 0.0) == 700.0);
  KernelField f = gaussian(GroupDescriptor::abelian(1));
  f.quadrature.d_radius = 800.0;
  CHECK_THROWS_AS(integrate(f), InvalidArgument);
  CHECK_THROWS_AS(integrate_shell(gaussian(GroupDescriptor::abelian(3)), {}), UnsupportedRegime);
  // a weight that outruns the decay is flagged, not silently accepted
  KernelField slow = gaussian(GroupDescriptor::abelian(1));
  slow.evaluate = [](const PointG& x) { return std::exp(-0.5 * g_distance(x, GroupDescriptor::abelian(1))); };
  slow.quadrature.d_radius = 20.0;
  CHECK_FALSE(integrate(slow).trusted);
}
