#pragma once

// Integration of kernel fields over G with respect to dmu = dz du.
//
// Shell rule (QuadMethod::adaptive): coarea in r = |x|_d,
//   Int_G F dmu = Int_0^R sinh r dr Int_{-r}^{r} du e^{Qu/2} rho^{Q-2} Int_{S^{Q-1}} F(e^{u/2} rho s, u) ds,
//   rho = sqrt(2 (cosh r - cosh u)),
// Gauss-Legendre panels in r, u = r sin(beta) with adaptive Gauss-Kronrod in beta.
// Abelian Q = 1, 2 only.

#include "naheat/na_group.hpp"

#include <functional>
#include <string>

namespace naheat {

enum class Reduce { signed_value, absolute };

struct IntegralResult {
  double value = 0.0;
  double est_abs_error = 0.0;
  double radius = 0.0;        // truncation radius actually used
  double outer_fraction = 0.0; // share of the last radial tenth, a truncation diagnostic
  bool trusted = true;
  std::string diagnosis;
};

struct IntegrateOptions {
  Reduce reduce = Reduce::absolute;
  // extra radial weight w(|x|_d); empty means 1
  std::function<double(double)> radial_weight;
  // exponential growth rate of radial_weight (for the automatic radius)
  double weight_rate = 0.0;
  bool parallel = true;
};

IntegralResult integrate(const KernelField& f, const IntegrateOptions& opt = {});

// The individual rules, exposed for cross-checks and the benchmark.
IntegralResult integrate_shell(const KernelField& f, const IntegrateOptions& opt);
IntegralResult integrate_shell_serial(const KernelField& f, const IntegrateOptions& opt);
IntegralResult integrate_tensor(const KernelField& f, const IntegrateOptions& opt);
IntegralResult integrate_monte_carlo(const KernelField& f, const IntegrateOptions& opt);

// Automatic truncation radius for a field at heat time t with weight growth rate a.
double auto_radius(double t, int Q, double weight_rate);

// Threads used by the parallel rules (NA_HEAT_THREADS caps it).
int worker_threads();

}  // namespace naheat
