#include "doctest.h"

#include "naheat/estimator.hpp"
#include "naheat/heat_kernel.hpp"

#include <cmath>
#include <vector>

using namespace naheat;

namespace {

const GroupDescriptor& q1() {
  static const GroupDescriptor g = GroupDescriptor::parse("abelian:1");
  return g;
}

}  // namespace

TEST_CASE("weighted L1 of the heat kernel") {
  const KernelField h4 = heat_field({}, 4.0, q1());
  CHECK(weighted_l1(h4, 0.0, 4.0) == doctest::Approx(1.0).epsilon(1e-4));
  double prev = 0.0;
  for (double eps : {0.0, 0.25, 0.5, 1.0}) {
    const double v = weighted_l1(h4, eps, 4.0);
    CHECK(v >= prev);
    prev = v;
  }
  CHECK_THROWS_AS(weighted_l1(h4, 1.2, 4.0), InvalidArgument);
  CHECK_THROWS_AS(weighted_l1(h4, -0.1, 4.0), InvalidArgument);
  // the involution is an L1 isometry
  for (int j : {0, 1}) {
    const double a = weighted_l1(heat_field({j}, 2.0, q1()), 0.0, 2.0);
    const double b = weighted_l1(heat_field({kStar, j}, 2.0, q1()), 0.0, 2.0);
    CHECK(b == doctest::Approx(a).epsilon(1e-6));
  }
}

TEST_CASE("decay fit on synthetic data") {
  std::vector<std::pair<double, double>> pts, flat;
  for (double t : {1.0, 2.0, 4.0, 8.0, 16.0}) {
    pts.push_back({t, 3.0 * std::pow(t, -1.5)});
    flat.push_back({t, 0.7});
  }
  const auto [slope, c] = decay_fit(pts);
  CHECK(slope == doctest::Approx(-1.5).epsilon(1e-12));
  CHECK(c == doctest::Approx(3.0).epsilon(1e-12));
  CHECK(std::abs(decay_fit(flat).first) < 1e-12);
  CHECK_THROWS_AS(decay_fit({{1, 1}, {2, 1}, {3, 1}}), InvalidArgument);
  CHECK_THROWS_AS(decay_fit({{2, 1}, {2, 1}, {2, 1}, {2, 1}}), InvalidArgument);
  CHECK_THROWS_AS(decay_fit({{1, 1}, {2, 0}, {3, 1}, {4, 1}}), InvalidArgument);
}

TEST_CASE("inner integral") {
  // alpha = beta = delta = 0, theta = 0: the xi integral is 2/(1 + cosh u), and Int 2/(1+cosh u) du = 4
  CHECK(inner_integral(0, 0, 0, 0) == doctest::Approx(4.0).epsilon(1e-6));
  // theta = 0, general delta: Int xi^{-2}(xi^delta + cd) e^{-A/xi} dxi = Gamma(1-delta) A^{delta-1} + cd / A
  for (double delta : {0.25, 0.5}) {
    auto f = [&](double u) {
      const double A = 1 + std::cosh(u);
      return std::tgamma(1 - delta) * std::pow(A, delta - 1) + std::pow(std::cosh(u), delta) / A;
    };
    // exponential decay in u at rate 1 - delta
    double want = 0.0;
    const double du = 1e-3;
    for (double u = -60; u < 60; u += du) want += f(u + 0.5 * du) * du;
    CHECK(inner_integral(0, 0, 0, delta) == doctest::Approx(want).epsilon(1e-6));
  }
  // theta profile: value e^{-(delta-1-beta+alpha) theta} settles to a constant (alpha > 0),
  // with an extra 1 + theta when alpha = 0
  for (double delta : {0.0, 0.25, 0.5}) {
    for (double alpha : {0.0, 0.5}) {
      const double beta = 1.0;
      auto ratio = [&](double th) {
        const double scale = std::exp((delta - 1 - beta + alpha) * th) * (alpha == 0 ? 1 + th : 1.0);
        return inner_integral(alpha, beta, th, delta) / scale;
      };
      double hi = 0.0;
      for (double th : {0.0, 5.0, 10.0, 15.0, 20.0}) hi = std::max(hi, ratio(th));
      CAPTURE(delta);
      CAPTURE(alpha);
      CHECK(std::isfinite(hi));
      CHECK(ratio(20.0) <= hi);
      CHECK(std::abs(ratio(20.0) / ratio(15.0) - 1) < 0.25);
    }
  }
  CHECK_THROWS_AS(inner_integral(1.0, 0.5, 0, 0), InvalidArgument);
  CHECK_THROWS_AS(inner_integral(0, 0, 0, 0.7), InvalidArgument);
}

TEST_CASE("proposition reports") {
  const std::vector<double> grid{4, 8, 16, 32, 64};
  const EstimateReport grad = verify_proposition(Proposition::P3_5_gradient, 0.0, grid, {}, q1());
  CHECK(grad.passed);
  CHECK(grad.fitted_slope == doctest::Approx(-0.5).epsilon(0.2));
  const EstimateReport mass = verify_proposition(Proposition::P3_5_mass, 0.25, grid, {}, q1());
  CHECK(mass.passed);
  const EstimateReport again = verify_proposition(Proposition::P3_5_mass, 0.25, grid, {}, q1());
  CHECK(again.norms == mass.norms);
  const EstimateReport mixed = verify_proposition(Proposition::P3_6_mixed, 0.0, grid, {}, q1());
  CHECK(mixed.passed);
  CHECK(std::abs(mixed.fitted_slope + 1.5) <= 0.15);
  ProofCheckOptions pw;
  pw.j = 0;
  pw.l = 1;
  const EstimateReport point = verify_proposition(Proposition::P3_8_pointwise, 0.0, {1, 4, 16}, {}, q1(), pw);
  CHECK(point.passed);
  CHECK(point.norms.size() == 3);

  ProofCheckOptions bad;
  bad.k = 0;
  bad.l = 0;
  CHECK_THROWS_AS(verify_proposition(Proposition::P3_7_third, 0.0, grid, {}, q1(), bad), InvalidArgument);
  CHECK_THROWS_AS(verify_proposition(Proposition::P3_6_mixed, 0.0, {0.25, 4.0}, {}, q1()), InvalidArgument);
  for (auto p : {Proposition::P3_5_mass, Proposition::P3_6_mixed, Proposition::P3_8_pointwise})
    CHECK(parse_proposition(to_string(p)) == p);
  CHECK_THROWS_AS(parse_proposition("P9"), InvalidArgument);
}
