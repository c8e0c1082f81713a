#pragma once

// Riesz transform kernels: dyadic pieces k_n (t in [2^n, 2^{n+1}]) and the tail k^(inf) (t >= 1).
//
// First order:  k_n = Int t^{-1/2} Y h_t dt,  Y = Sum_j y_j X_j.
// Second order: k_n = Int X_j (X_l h_t)^* dt.
// Tail:         k^(inf) = Int_1^inf X_j (X_l h_t)^* dt, split by (j, l) into cases I..IV.

#include "naheat/integrate.hpp"
#include "naheat/na_group.hpp"
#include "naheat/radial.hpp"

#include <memory>
#include <string>
#include <vector>

namespace naheat {

enum class KernelOrder { first, second };

struct DyadicKernel {
  int n = 0;
  KernelOrder order = KernelOrder::first;
  std::vector<double> y;  // first order: coefficients of X_0..X_q
  int j = 1, l = 1;       // second order
  double t0 = 1.0, t1 = 2.0;
  KernelField field;
  // symbolic form and time-folded profile, so derivatives of k and k^* stay exact
  RadialExpr expr;
  std::shared_ptr<const RadialSource> profile;
};

// first order with Y = X_j
DyadicKernel dyadic_kernel(int n, KernelOrder order, int j, int l, const GroupDescriptor& g,
                           const QuadratureSpec& qs = {});
// first order with a general horizontal Y
DyadicKernel dyadic_kernel_first(int n, const std::vector<double>& y, const GroupDescriptor& g,
                                 const QuadratureSpec& qs = {});

// X_i k^*, i = 0..q, and |grad_H k^*|
std::vector<KernelField> dyadic_star_gradient(const DyadicKernel& k);
KernelField dyadic_star_gradient_norm(const DyadicKernel& k);

struct CzCheck {
  std::vector<int> n;
  std::vector<double> values;       // raw integrals
  std::vector<double> normalized;   // compared against one constant
  double bound = 0.0;               // fitted B: max normalized value
  double spread = 0.0;              // max / median of normalized
  bool trusted = true;
  bool passed = false;
  std::string diagnosis;
};

// Int |k_n| (1 + scale |x|_d) dmu
IntegralResult cz_size_value(const DyadicKernel& k, double scale);
// Int |grad_H k_n^*| dmu
IntegralResult cz_smoothness_value(const DyadicKernel& k);

// Over a range of n: size uses scale 2^{-n/2}; smoothness is normalized by 2^{n/2}.
// Pass: all finite and trusted, max/median of the normalized values < max_spread.
CzCheck cz_size_check(const std::vector<DyadicKernel>& ks, double max_spread = 2.0);
CzCheck cz_smoothness_check(const std::vector<DyadicKernel>& ks, double max_spread = 2.0);

enum class TailCase { I, II, III, IV };
std::string to_string(TailCase c);

struct TailPart {
  std::string name;
  double multiplicity = 1.0;
  KernelField field;
  bool psi_part = false;  // built from the Psi weight over [1, T]; carries the truncation remainder
};

struct TailKernel {
  int j = 1, l = 1;
  TailCase case_tag = TailCase::I;
  double T = 256.0;
  KernelField field;
  std::vector<TailPart> parts;
  // how the parts were built: word of the case I/II/IV integrand, case III = its involution
  std::vector<int> word;
  bool involuted = false;
  QuadratureSpec quadrature;
};

TailKernel tail_kernel(int j, int l, const GroupDescriptor& g, double T = 256.0,
                       const QuadratureSpec& qs = {});

struct TailNorm {
  double value = 0.0;
  double est_abs_error = 0.0;
  double radius = 0.0;
  double outer_fraction = 0.0;
  bool trusted = true;
  std::string diagnosis;
  // Int_T^inf of the Psi parts, bounded by 2 C T^{-1/2} with C = max ||part_t||_1 t^{3/2}
  // fitted on t in {T/4, T/2, T}
  double remainder = 0.0;
  double remainder_fraction = 0.0;
  bool remainder_ok = false;  // remainder_fraction < 1%
  std::vector<std::pair<std::string, double>> part_norms;
};

// est_abs_error = quadrature error + remainder (when with_remainder)
TailNorm tail_l1_norm(const TailKernel& k, bool with_remainder = true);

// Truncation stability: the spatial radius halved against the automatic one (doubling past
// ~700 overflows sinh), and the time cutoff T against 2T.
struct TailStability {
  TailNorm base;
  double half_radius_value = 0.0;
  double radius_change = 0.0;  // relative
  double double_T_value = 0.0;
  double T_change = 0.0;       // relative
  bool passed = false;         // finite, trusted, both changes < 5%
};
TailStability tail_stability(const TailKernel& k);

}  // namespace naheat
