#pragma once

// Heat kernel h_t on G and its derivatives.
//
// Three evaluation routes:
//  A  abelian N, xi integrated in closed form: each term is a theta moment of a weight
//     (Psi_t, d/dxi[xi Psi_t] or its bracketed second form). Keeps the named I/J parts.
//  R  abelian N, symbolic derivatives of e^{-Qu/2} F_t(c) (radial.hpp). Any word, any t for Q = 1.
//  B  any N, xi outermost: Int Psi_t(xi) e^{-cosh u/xi} h^N_{e^u xi/2}(z) dxi on a log-xi grid.
//
// Words are written as applied: {j, kStar, l} is X_j (X_l h)^*.

#include "naheat/na_group.hpp"
#include "naheat/radial.hpp"
#include "naheat/subordination.hpp"

#include <memory>
#include <string>
#include <vector>

namespace naheat {

struct HeatPart {
  std::string name;   // I1, I2, J1, J2, J3
  double multiplicity = 1.0;  // J2 enters twice
  double value = 0.0;
};

struct HeatEval {
  double t = 0.0;
  PointG x;
  double value = 0.0;
  std::vector<HeatPart> parts;  // empty when the pattern has no split
  double est_abs_error = 0.0;
  std::string route;            // "A", "R" or "B"
};

HeatEval h(double t, const PointG& x, const GroupDescriptor& g);
// X_j h_t, j = 0..q; j = 0 carries I1 (the e^u/xi term) and I2 (the d/dxi[xi Psi] term)
HeatEval h_derivative(int j, double t, const PointG& x, const GroupDescriptor& g);
// (X_j h_t)^*
HeatEval h_star_derivative(int j, double t, const PointG& x, const GroupDescriptor& g);
// X_j (X_l h_t)^*
HeatEval h_second_star(int j, int l, double t, const PointG& x, const GroupDescriptor& g);
// X_l X_k (X_j h_t)^*
HeatEval h_third_star(int l, int k, int j, double t, const PointG& x, const GroupDescriptor& g);

// Any word (with kStar), route R; abelian only.
HeatEval h_word(const std::vector<int>& word, double t, const PointG& x, const GroupDescriptor& g);

// Route B evaluations, exposed for cross-checks. X_0 is differentiated under the xi integral
// (heat equation on N for d/ds), with no integration by parts.
double h_xi_direct(double t, const PointG& x, const GroupDescriptor& g);
double h_derivative_xi_direct(int j, double t, const PointG& x, const GroupDescriptor& g);

// --- route A decompositions ---

enum class Weight { Psi, D1, D2 };

// coef * z^zexp * e^{uexp u} * (2 pi e^u)^{-Q/2} * W_k(c), W_k a theta moment of the weight
struct Atom {
  double coef = 1.0;
  std::array<int, kMaxDim> zexp{};
  int uexp = 0;
  Weight weight = Weight::Psi;
  int k = 0;
};

struct NamedPart {
  std::string name;
  double multiplicity = 1.0;
  std::vector<Atom> atoms;
};

// Split of a word into named parts; throws InvalidArgument for words without a route A form.
std::vector<NamedPart> route_a_parts(const std::vector<int>& word, int Q);
bool has_route_a(const std::vector<int>& word, int Q);

// Theta rules for the two weights; D2 reuses the d rule.
struct WeightRules {
  std::shared_ptr<const ThetaRule> psi;  // Psi_t, or a time-folded Psi
  std::shared_ptr<const ThetaRule> d;    // D1 at t, or T1 for Int_1^inf
};
WeightRules weight_rules(double t);

// Field summing the selected parts (all when names is empty).
KernelField route_a_field(const std::vector<NamedPart>& parts, const WeightRules& rules,
                          const GroupDescriptor& g, double time_scale,
                          const std::vector<std::string>& names = {});

// Route R field of a word at time t (Q = 1 may use t < kTMin).
KernelField heat_field(const std::vector<int>& word, double t, const GroupDescriptor& g,
                       const QuadratureSpec& qs = {});

// Horizontal gradient fields X_0..X_q applied after the word.
std::vector<KernelField> gradient_fields(const std::vector<int>& word, double t,
                                         const GroupDescriptor& g, const QuadratureSpec& qs = {});

// --- small-time Gaussian bound ---

struct BoundFit {
  double C = 0.0;
  double b = 0.0;
  double omega = 0.0;
  double max_violation = 0.0;  // max of |X^alpha h| / bound, <= 1 by construction of C
  std::size_t points = 0;
};

// |X^alpha h_t(x)| <= C t^{-(Q+1+|alpha|)/2} e^{omega t} e^{-b |x|_d^2 / t}, abelian Q = 1.
// b and omega come from a log-linear least-squares fit, C is then the smallest valid constant.
BoundFit small_time_bound_fit(const MultiIndex& alpha, const std::vector<double>& t_grid,
                              const std::vector<PointG>& x_grid, const GroupDescriptor& g);

}  // namespace naheat
