#pragma once

// Weighted L1 norms of kernel fields and decay-rate checks in t.

#include "naheat/integrate.hpp"
#include "naheat/na_group.hpp"

#include <string>
#include <utility>
#include <vector>

namespace naheat {

struct EstimateReport {
  std::string label;
  std::vector<double> t_values;
  std::vector<double> norms;
  std::vector<double> est_abs_errors;
  double epsilon = 0.0;
  double target_slope = 0.0;
  double fitted_slope = 0.0;
  double fitted_constant = 0.0;  // max over the grid of norm / t^target
  double ratio_spread = 0.0;     // max / median of norm / t^target
  double tolerance = 0.0;
  bool trusted = true;
  bool passed = false;
  std::string diagnosis;
};

// Int_G e^{eps |x|_d / sqrt t} |f| dmu. Requires eps/sqrt(t) <= 1/2.
IntegralResult weighted_l1_result(const KernelField& f, double epsilon, double t);
double weighted_l1(const KernelField& f, double epsilon, double t);

// Least-squares line through (log t, log norm): returns (slope, e^intercept).
std::pair<double, double> decay_fit(const std::vector<std::pair<double, double>>& points);

// Int_R Int_0^inf cosh(alpha u) xi^{-2-beta} (xi^delta + cosh^delta u) e^{-(cosh theta + cosh u)/xi} dxi du
double inner_integral(double alpha, double beta, double theta, double delta);

enum class Proposition { P3_5_mass, P3_5_gradient, P3_6_mixed, P3_7_third, P3_8_pointwise };
std::string to_string(Proposition p);
Proposition parse_proposition(const std::string& s);

struct ProofCheckOptions {
  int j = 1, l = 1;    // P3_6: X_j (X_l h)^*; P3_7: X_l X_k (X_j h)^*; P3_8: X_j (X_l h)^*
  int k = 0;
  int grid_n = 21;     // P3_8 grid is grid_n x grid_n over [-4,4]^2 in (z, u)
  double slope_tolerance = -1.0;  // < 0: 0.1 for first order, 0.15 otherwise
  double max_spread = 2.0;
};

EstimateReport verify_proposition(Proposition which, double epsilon, const std::vector<double>& t_grid,
                                  const QuadratureSpec& budget, const GroupDescriptor& g,
                                  const ProofCheckOptions& opt = {});

// sup over the (z,u) grid of |X_j (X_l h_t)^*| t^{3/2} e^{Qu/2} / cosh u
double pointwise_bound_ratio(int j, int l, double t, int grid_n, const GroupDescriptor& g);

}  // namespace naheat
