#pragma once

// Radial calculus for abelian N = R^Q.
//
// h_t(z,u) = e^{-Qu/2} F_t(c), c = cosh|x|_d = cosh u + e^{-u}|z|^2/2.
// Any word in X_0..X_q and * applied to h_t is a finite sum of terms
//   coef * z^alpha * e^{p u/2} * F^{(k)}(c),
// so a derivative field needs only the profile derivatives F^{(k)} at r = |x|_d.

#include "naheat/na_group.hpp"
#include "naheat/subordination.hpp"

#include <array>
#include <memory>
#include <vector>

namespace naheat {

struct RadialTerm {
  double coef = 0.0;
  std::array<int, kMaxDim> zexp{};  // powers of z_1..z_Q
  int uexp2 = 0;                    // power of e^{u/2}
  int slot = 0;                     // which F^{(k)}
};

class RadialExpr {
 public:
  // e^{-Qu/2} F(c)
  static RadialExpr heat(int Q);

  RadialExpr apply(int j) const;  // X_j, j = 0..Q
  RadialExpr star() const;
  RadialExpr operator+(const RadialExpr& o) const;
  RadialExpr operator*(double a) const;

  int Q() const { return Q_; }
  int max_slot() const;
  const std::vector<RadialTerm>& terms() const { return terms_; }
  // slots[k] = F^{(k)}(c) at the point's c; abs_sum gets Sum |term| when given
  double eval(const PointG& x, const Scaled* slots, double* abs_sum = nullptr) const;

 private:
  void merge();
  int Q_ = 1;
  std::vector<RadialTerm> terms_;
};

// Leftmost op is applied last: {1, -1, 0} means X_1 (X_0 h)^*; -1 stands for *.
inline constexpr int kStar = -1;
RadialExpr radial_word(int Q, const std::vector<int>& ops);

inline constexpr int kMaxRadialSlots = 6;

// F^{(k)}(cosh r) for k < slots().
class RadialSource {
 public:
  virtual ~RadialSource() = default;
  virtual int slots() const = 0;
  virtual void eval(double r, Scaled* out) const = 0;
};

// F from a theta rule: F^{(k)}(c) = (2 pi)^{-Q/2} Gamma(1+Q/2) (-1)^k (1+Q/2)_k Theta_{0, 2+Q/2+k}(c).
// With a time-folded rule the same formula gives Int t^p F_t dt.
class ThetaProfile : public RadialSource {
 public:
  ThetaProfile(int Q, std::shared_ptr<const ThetaRule> rule, int slots);
  int slots() const override { return slots_; }
  void eval(double r, Scaled* out) const override;
  // also reports the worst cancellation factor over the slots
  void eval(double r, Scaled* out, double& cond) const;

 private:
  int Q_, slots_;
  std::shared_ptr<const ThetaRule> rule_;
  std::vector<double> logc_, sgn_, m_, P_;
};

// Q = 1, any t > 0: F(c) = A Int_r^inf s e^{-s^2/4t} (cosh s - c)^{-1/2} ds, A = sqrt2 (4 pi t)^{-3/2}.
// Derivatives go through psi(y) = s e^{-s^2/4t}/sinh s, y = cosh s, with Taylor jets.
class McKeanProfile : public RadialSource {
 public:
  McKeanProfile(double t, int slots);
  int slots() const override { return slots_; }
  void eval(double r, Scaled* out) const override;
  static constexpr double kMaxRadius = 300.0;

 private:
  double t_;
  int slots_;
};

// Sum_i w_i * source_i
class SummedProfile : public RadialSource {
 public:
  SummedProfile(std::vector<std::shared_ptr<const RadialSource>> parts, std::vector<double> weights);
  int slots() const override { return slots_; }
  void eval(double r, Scaled* out) const override;

 private:
  std::vector<std::shared_ptr<const RadialSource>> parts_;
  std::vector<double> w_;
  int slots_;
};

// Profile of h_t: theta rule for t >= kTMin, McKean below (Q = 1 only).
// For Q = 1 the theta rule hands over to McKean where its sum cancels by more than 1e6.
std::shared_ptr<const RadialSource> heat_profile(int Q, double t, int slots);

// Evaluable field for expr with the given profile; shell evaluation computes the slots once per r.
KernelField radial_field(const RadialExpr& expr, std::shared_ptr<const RadialSource> src,
                         const GroupDescriptor& g, double time_scale, const QuadratureSpec& qs = {});

// sqrt(Sum_i expr_i^2) sharing one profile evaluation per point (gradient norms).
KernelField radial_norm_field(const std::vector<RadialExpr>& exprs,
                              std::shared_ptr<const RadialSource> src, const GroupDescriptor& g,
                              double time_scale, const QuadratureSpec& qs = {});

// Int_{t0}^{t1} t^p F_t dt with 32 Gauss-Legendre nodes in t: one folded theta rule when
// t0 >= kTMin, otherwise (Q = 1) the sum of McKean profiles at the nodes.
std::shared_ptr<const RadialSource> folded_profile(int Q, double t0, double t1, double p, int slots,
                                                   TimeRule rule = TimeRule::gauss32);

}  // namespace naheat
