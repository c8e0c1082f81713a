#pragma once

// Subordination weight Psi_t(xi) and its relatives.
//
//   Psi_t(xi)  = xi^-2 Int_0^inf g_t(theta) e^{-cosh(theta)/xi} dtheta,
//   g_t(theta) = sinh(theta) sin(pi theta / 2t) e^{(pi^2 - theta^2)/4t} / sqrt(4 pi^3 t).
//
// d/dxi [xi Psi_t] and its time integral over [1, inf) have the same shape with other g's.

#include <cstddef>
#include <vector>

namespace naheat {

inline constexpr double kTMin = 0.25;

struct PsiEval {
  double t = 0.0;   // 0 for the time-integrated weights
  double xi = 0.0;
  double value = 0.0;
  double est_abs_error = 0.0;
};

PsiEval psi(double t, double xi, double rel_tol = 1e-11);
// d/dxi [xi Psi_t(xi)]
PsiEval psi_xi_derivative(double t, double xi, double rel_tol = 1e-11);
// d/dxi [xi d/dxi [xi Psi_t(xi)]]
PsiEval psi_second_xi_derivative(double t, double xi, double rel_tol = 1e-11);
// Int_1^inf d/dxi [xi Psi_t] dt, closed double integral over (s, theta) in [0, pi] x [0, inf)
PsiEval psi_time_integrated(double xi, double rel_tol = 1e-11);
// Int_1^inf d/dxi [xi d/dxi [xi Psi_t]] dt
PsiEval psi_second_time_integrated(double xi, double rel_tol = 1e-11);

// t^{3/2} d/dxi [xi Psi_t(xi)] as a function of sigma = t^{-1/2}; finite at sigma = 0.
double psi_xi_derivative_scaled(double sigma, double xi, double rel_tol = 1e-11);

// Int_{t0}^{t1} d/dxi [xi Psi_t(xi)] dt by adaptive quadrature in log t.
PsiEval psi_xi_derivative_time_integral(double t0, double t1, double xi, double rel_tol = 1e-10);
// Int_{T}^{inf} of the same integrand, through sigma = t^{-1/2}.
PsiEval psi_xi_derivative_tail(double T, double xi, double rel_tol = 1e-10);

// Int_0^inf Psi_t(xi) Int_R e^{-cosh u / xi} du dxi; equals 1.
double psi_mass(double t, double rel_tol = 1e-9);

// Bound shapes: xi^-2 Int e^{-theta^2/4 - cosh/xi} cosh dtheta (S') and
// xi^-3 Int e^{-theta^2/4 - cosh/xi} cosh^2 dtheta (S'').
double time_integrated_bound_shape(double xi);
double time_integrated_bound_shape_second(double xi);

// Int_0^pi cos(s theta / 2) e^{s^2/4} ds
double cosine_gauss_integral(double theta);

// --- theta rules in log form, shared by the heat kernel and the Riesz kernels ---

enum class WeightKind { Psi, D1, T1 };

// Nodes of Int_0^inf g(theta) F(theta) dtheta with w_i g(theta_i) = sign_i exp(log_abs_i).
struct ThetaRule {
  std::vector<double> log_abs;
  std::vector<signed char> sign;
  std::vector<double> log_cosh;  // log cosh theta_i
  std::size_t size() const { return log_abs.size(); }
};

// Value mant * exp(log_scale); keeps underflowing and overflowing magnitudes apart.
struct Scaled {
  double mant = 0.0;
  double log_scale = 0.0;
  double value() const;
};

// Rule for one weight at time t (T1 ignores t).
ThetaRule theta_rule(WeightKind kind, double t);

enum class TimeRule { gauss32, log_composite };
// Rule for Int_{t0}^{t1} t^p g_t dt, the time integral folded into the theta weights.
ThetaRule theta_rule_time_integrated(WeightKind kind, double t0, double t1, double p,
                                     TimeRule rule);

// Int g(theta) cosh^m(theta) (cosh r + cosh theta)^{1-P} dtheta
Scaled theta_moment(const ThetaRule& rule, double r, double m, double P);
// same for several (m, P) pairs at once; cond[k] (if given) gets Sum|terms| / |Sum terms|
void theta_moments(const ThetaRule& rule, double r, const double* m, const double* P,
                   std::size_t count, Scaled* out, double* cond = nullptr);

double log_cosh(double x);

}  // namespace naheat
