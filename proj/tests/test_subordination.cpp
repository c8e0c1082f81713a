#include "doctest.h"

#include "naheat/quadrature.hpp"
#include "naheat/subordination.hpp"
#include "naheat/stratified_group.hpp"

#include <gsl/gsl_sf_bessel.h>

#include <algorithm>
#include <cmath>
#include <vector>

using namespace naheat;

namespace {

std::vector<double> log_grid(double a, double b, int n) {
  std::vector<double> v;
  for (int i = 0; i < n; ++i) v.push_back(a * std::pow(b / a, i / double(n - 1)));
  return v;
}

double fd_xi(const std::function<double(double)>& f, double xi) {
  const double h = xi * 1e-5;
  return ((xi + h) * f(xi + h) - (xi - h) * f(xi - h)) / (2 * h);
}

}  // namespace

TEST_CASE("Fubini mass identity") {
  for (double t : {1.0, 4.0, 16.0}) CHECK(psi_mass(t) == doctest::Approx(1.0).epsilon(1e-5));
}

TEST_CASE("mass through an independent xi quadrature with Bessel K0") {
  // Int_R e^{-cosh u / xi} du = 2 K_0(1/xi)
  auto f = [](double s) {
    const double xi = std::exp(s);
    return xi * psi(1.0, xi, 1e-10).value * 2.0 * gsl_sf_bessel_K0(1.0 / xi);
  };
  const auto br = quad::panel_breaks(-5.0, 45.0, 0.5);
  CHECK(quad::adaptive_panels(f, br, 1e-9).value == doctest::Approx(1.0).epsilon(1e-6));
}

TEST_CASE("small xi decay") {
  CHECK(std::abs(psi(1.0, 0.01).value) < 1e-40);
  CHECK(std::abs(psi_time_integrated(0.01).value) < 1e-40);
  CHECK(std::abs(psi_second_time_integrated(0.01).value) < 1e-35);  // e^{-100} times a power of xi
}

TEST_CASE("regime guard") {
  CHECK_THROWS_AS(psi(0.1, 1.0), UnsupportedRegime);
  CHECK_THROWS_AS(psi(1.0, -1.0), InvalidArgument);
}

TEST_CASE("self-convergence: est_abs_error covers refinement") {
  int ok = 0, total = 0;
  for (double t : log_grid(0.25, 16, 10))
    for (double xi : log_grid(0.1, 50, 10)) {
      const PsiEval a = psi(t, xi, 1e-8), b = psi(t, xi, 1e-12);
      ++total;
      ok += std::abs(a.value - b.value) <= a.est_abs_error + 1e-300;
    }
  CHECK(ok >= 0.95 * total);
}

TEST_CASE("xi derivatives against finite differences") {
  for (double t : {0.25, 1.0, 5.0})
    for (double xi : {0.3, 1.0, 4.0, 20.0}) {
      CAPTURE(t);
      CAPTURE(xi);
      const double d1 = psi_xi_derivative(t, xi).value;
      CHECK(d1 == doctest::Approx(fd_xi([&](double x) { return psi(t, x).value; }, xi)).epsilon(1e-5));
      CHECK(psi_second_xi_derivative(t, xi).value ==
            doctest::Approx(fd_xi([&](double x) { return psi_xi_derivative(t, x).value; }, xi)).epsilon(1e-5));
    }
}

TEST_CASE("time integral identity on a log grid") {
  for (double xi : log_grid(0.1, 50, 10)) {
    CAPTURE(xi);
    const double lhs = psi_xi_derivative_time_integral(1.0, 200.0, xi).value + psi_xi_derivative_tail(200.0, xi).value;
    CHECK(lhs == doctest::Approx(psi_time_integrated(xi).value).epsilon(1e-5));
  }
}

TEST_CASE("partial time integrals converge like T^{-1/2}") {
  const double xi = 2.0;
  const double full = psi_time_integrated(xi).value;
  std::vector<double> r;
  for (double T : {50.0, 200.0, 800.0})
    r.push_back(std::abs(psi_xi_derivative_time_integral(1.0, T, xi).value - full) * std::sqrt(T));
  const auto [lo, hi] = std::minmax_element(r.begin(), r.end());
  CHECK(*hi > 0);
  CHECK(*hi / *lo < 3.0);
}

TEST_CASE("time-integrated weights: bound shapes and derivative relation") {
  std::vector<double> ratio, ratio2;
  for (double xi : log_grid(0.1, 50, 12)) {
    ratio.push_back(std::abs(psi_time_integrated(xi).value) / time_integrated_bound_shape(xi));
    ratio2.push_back(std::abs(psi_second_time_integrated(xi).value) /
                     (time_integrated_bound_shape(xi) + time_integrated_bound_shape_second(xi)));
  }
  // one constant across the range: bounded, and not degenerate
  for (const auto* v : {&ratio, &ratio2}) {
    const double mx = *std::max_element(v->begin(), v->end());
    CHECK(std::isfinite(mx));
    CHECK(mx < 10.0);
  }
  for (double xi : {0.5, 1.0, 3.0, 10.0})
    CHECK(psi_second_time_integrated(xi).value ==
          doctest::Approx(fd_xi([](double x) { return psi_time_integrated(x).value; }, xi)).epsilon(1e-4));
}
