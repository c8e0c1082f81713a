#include "naheat/radial.hpp"

#include "naheat/jet.hpp"
#include "naheat/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numbers>
#include <string>

namespace naheat {

namespace {
constexpr int kMaxSlots = kMaxRadialSlots;
constexpr double kPi = std::numbers::pi;
}  // namespace

RadialExpr RadialExpr::heat(int Q) {
  if (Q < 1 || Q > kMaxDim) throw InvalidArgument("radial calculus: Q out of range");
  RadialExpr e;
  e.Q_ = Q;
  RadialTerm t;
  t.coef = 1.0;
  t.uexp2 = -Q;
  e.terms_.push_back(t);
  return e;
}

void RadialExpr::merge() {
  std::map<std::tuple<std::array<int, kMaxDim>, int, int>, double> acc;
  for (const auto& t : terms_) acc[{t.zexp, t.uexp2, t.slot}] += t.coef;
  terms_.clear();
  for (const auto& [key, c] : acc) {
    if (c == 0.0) continue;
    RadialTerm t;
    t.coef = c;
    t.zexp = std::get<0>(key);
    t.uexp2 = std::get<1>(key);
    t.slot = std::get<2>(key);
    terms_.push_back(t);
  }
}

RadialExpr RadialExpr::apply(int j) const {
  if (j < 0 || j > Q_) throw InvalidArgument("radial calculus: field index out of range");
  RadialExpr r;
  r.Q_ = Q_;
  for (const auto& t : terms_) {
    if (j == 0) {
      // d/du: e^{pu/2} -> p/2, and dc/du = (e^u - e^{-u})/2 - e^{-u}|z|^2/2
      RadialTerm a = t;
      a.coef *= 0.5 * t.uexp2;
      r.terms_.push_back(a);
      RadialTerm b = t;
      b.coef *= 0.5;
      b.uexp2 += 2;
      b.slot += 1;
      r.terms_.push_back(b);
      RadialTerm c = t;
      c.coef *= -0.5;
      c.uexp2 -= 2;
      c.slot += 1;
      r.terms_.push_back(c);
      for (int i = 0; i < Q_; ++i) {
        RadialTerm d = c;
        d.zexp[i] += 2;
        r.terms_.push_back(d);
      }
    } else {
      // e^u d/dz_j, dc/dz_j = e^{-u} z_j
      const int i = j - 1;
      if (t.zexp[i] > 0) {
        RadialTerm a = t;
        a.coef *= t.zexp[i];
        a.zexp[i] -= 1;
        a.uexp2 += 2;
        r.terms_.push_back(a);
      }
      RadialTerm b = t;
      b.zexp[i] += 1;
      b.slot += 1;
      r.terms_.push_back(b);
    }
  }
  r.merge();
  return r;
}

RadialExpr RadialExpr::star() const {
  // f^*(z,u) = e^{-Qu} f(-e^{-u} z, -u); c is unchanged
  RadialExpr r = *this;
  for (auto& t : r.terms_) {
    int deg = 0;
    for (int i = 0; i < Q_; ++i) deg += t.zexp[i];
    if (deg % 2) t.coef = -t.coef;
    t.uexp2 = -t.uexp2 - 2 * deg - 2 * Q_;
  }
  r.merge();
  return r;
}

RadialExpr RadialExpr::operator+(const RadialExpr& o) const {
  if (o.Q_ != Q_) throw InvalidArgument("radial calculus: mismatched Q");
  RadialExpr r = *this;
  r.terms_.insert(r.terms_.end(), o.terms_.begin(), o.terms_.end());
  r.merge();
  return r;
}

RadialExpr RadialExpr::operator*(double a) const {
  RadialExpr r = *this;
  for (auto& t : r.terms_) t.coef *= a;
  r.merge();
  return r;
}

int RadialExpr::max_slot() const {
  int m = 0;
  for (const auto& t : terms_) m = std::max(m, t.slot);
  return m;
}

double RadialExpr::eval(const PointG& x, const Scaled* slots, double* abs_sum) const {
  std::array<double, kMaxDim> lz{};
  std::array<int, kMaxDim> sz{};
  for (int i = 0; i < Q_; ++i) {
    const double v = x.z[i];
    lz[i] = v == 0.0 ? -std::numeric_limits<double>::infinity() : std::log(std::abs(v));
    sz[i] = v < 0 ? -1 : 1;
  }
  double s = 0.0, a = 0.0;
  for (const auto& t : terms_) {
    const Scaled& f = slots[t.slot];
    if (f.mant == 0.0) continue;
    double lg = 0.5 * t.uexp2 * x.u + f.log_scale;
    int sg = 1;
    bool zero = false;
    for (int i = 0; i < Q_; ++i) {
      if (t.zexp[i] == 0) continue;
      if (x.z[i] == 0.0) {
        zero = true;
        break;
      }
      lg += t.zexp[i] * lz[i];
      if (t.zexp[i] % 2) sg *= sz[i];
    }
    if (zero) continue;
    const double v = sg * t.coef * f.mant * std::exp(lg);
    s += v;
    a += std::abs(v);
  }
  if (abs_sum) *abs_sum = a;
  return s;
}

RadialExpr radial_word(int Q, const std::vector<int>& ops) {
  RadialExpr e = RadialExpr::heat(Q);
  for (auto it = ops.rbegin(); it != ops.rend(); ++it) e = (*it == kStar) ? e.star() : e.apply(*it);
  return e;
}

// ---------------------------------------------------------------------------

ThetaProfile::ThetaProfile(int Q, std::shared_ptr<const ThetaRule> rule, int slots)
    : Q_(Q), slots_(slots), rule_(std::move(rule)) {
  if (slots < 1 || slots > kMaxSlots) throw InvalidArgument("ThetaProfile: slot count");
  for (int k = 0; k < slots; ++k) {
    const double P = 2.0 + 0.5 * Q + k;
    // (2 pi)^{-Q/2} Gamma(1+Q/2) (1+Q/2)_k = (2 pi)^{-Q/2} Gamma(P-1)
    logc_.push_back(-0.5 * Q * std::log(2.0 * kPi) + std::lgamma(P - 1.0));
    sgn_.push_back(k % 2 ? -1.0 : 1.0);
    m_.push_back(0.0);
    P_.push_back(P);
  }
}

void ThetaProfile::eval(double r, Scaled* out) const {
  double cond = 0.0;
  eval(r, out, cond);
}

void ThetaProfile::eval(double r, Scaled* out, double& cond) const {
  std::array<double, kMaxSlots> c{};
  theta_moments(*rule_, r, m_.data(), P_.data(), static_cast<std::size_t>(slots_), out, c.data());
  cond = 0.0;
  for (int k = 0; k < slots_; ++k) {
    out[k].mant *= sgn_[k];
    out[k].log_scale += logc_[k];
    cond = std::max(cond, c[k]);
  }
}

// ---------------------------------------------------------------------------

namespace {

using J = Jet<kMaxSlots>;

// arccosh(1+v)^2 = Sum_n 2 (-1)^{n+1} (2v)^n / (n^2 binom(2n,n))
const std::array<double, 41>& acosh_sq_coeffs() {
  static const std::array<double, 41> c = [] {
    std::array<double, 41> a{};
    for (int n = 1; n < 41; ++n) {
      const double lb = std::lgamma(2.0 * n + 1) - 2.0 * std::lgamma(n + 1.0);
      a[n] = 2.0 * (n % 2 ? 1.0 : -1.0) * std::exp(n * std::log(2.0) - lb) / (double(n) * n);
    }
    return a;
  }();
  return c;
}

// x/sinh x = Sum_n (2 - 2^{2n}) B_{2n} x^{2n}/(2n)!, as a series in w = x^2
const std::array<double, 31>& x_over_sinh_coeffs() {
  static const std::array<double, 31> c = [] {
    std::array<double, 31> a{};
    a[0] = 1.0;
    for (int n = 1; n < 31; ++n) {
      // B_{2n}/(2n)! = (-1)^{n+1} 2 zeta(2n) / (2 pi)^{2n}
      const double b = (n % 2 ? 2.0 : -2.0) * std::riemann_zeta(2.0 * n) *
                       std::pow(2.0 * kPi, -2.0 * n);
      a[n] = (2.0 - std::ldexp(1.0, 2 * n)) * b;
    }
    return a;
  }();
  return c;
}

// Jet of psi(y) e^{r^2/4t} at y = cosh s, s = r + tau^2, where psi(cosh s) = s e^{-s^2/4t}/sinh s.
J psi_jet(double r, double tau, double t) {
  const double tau2 = tau * tau;
  const double s = r + tau2;
  J w;
  if (s < 1.0) {  // cosh s - 1 <= 0.55
    const double sh = std::sinh(0.5 * s);
    w = power_series(acosh_sq_coeffs(), J::variable(2.0 * sh * sh));
  } else {
    J ysq = J::variable(std::cosh(s)) * J::variable(std::cosh(s));
    const double sh = std::sinh(s);
    ysq.a[0] = sh * sh;  // y^2 - 1 without cancellation
    const J b = pow(ysq, -0.5);
    J a;
    a.a[0] = s;
    for (int k = 0; k + 1 < kMaxSlots; ++k) a.a[k + 1] = b.a[k] / (k + 1);
    w = a * a;
  }
  J S;
  if (w.a[0] <= 2.0) {
    S = power_series(x_over_sinh_coeffs(), w);
  } else {
    const J x = sqrt(w);
    S = x / sinh(x);
  }
  J e = w;
  e.a[0] = tau2 * (2.0 * r + tau2);  // s^2 - r^2
  return S * exp(e * (-0.25 / t));
}

}  // namespace

McKeanProfile::McKeanProfile(double t, int slots) : t_(t), slots_(slots) {
  if (!(t > 0)) throw InvalidArgument("McKeanProfile: t must be positive");
  if (slots < 1 || slots > kMaxSlots) throw InvalidArgument("McKeanProfile: slot count");
}

void McKeanProfile::eval(double r, Scaled* out) const {
  if (r > kMaxRadius)
    throw UnsupportedRegime("small-time profile limited to |x|_d <= " + std::to_string(kMaxRadius));
  const double t = t_;
  const double scale = std::sqrt(std::min(1.0, 2.0 * t / (r + std::sqrt(2.0 * t))));
  const double width = 0.25 * scale;
  const double tmax = std::sqrt(std::sqrt(r * r + 200.0 * t) - r);
  // graded panels where the integrand turns over at tau ~ sqrt(2r)
  std::vector<double> br{0.0};
  const double d = 0.5 * std::sqrt(2.0 * r);
  if (r > 0 && d < width) {
    double x = std::max(d * 1e-6, 1e-12);
    while (x < width) {
      br.push_back(x);
      x *= 2.0;
    }
  }
  for (double x = br.back() + width; x < tmax + width; x += width) br.push_back(x);
  const auto nodes = quad::composite_nodes(br, 16);
  std::array<double, kMaxSlots> acc{};
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    const double tau = nodes.x[i];
    const double tau2 = tau * tau;
    const double s = r + tau2;
    const double D = 2.0 * std::sinh(r + 0.5 * tau2) * std::sinh(0.5 * tau2);  // cosh s - cosh r
    const double jac = std::sinh(s) * 2.0 * tau / std::sqrt(D);
    const J p = psi_jet(r, tau, t);
    for (int k = 0; k < slots_; ++k) acc[k] += nodes.w[i] * jac * p.derivative(k);
  }
  const double logA = 0.5 * std::log(2.0) - 1.5 * std::log(4.0 * kPi * t) - r * r / (4.0 * t);
  for (int k = 0; k < slots_; ++k) out[k] = {acc[k], logA};
}

// ---------------------------------------------------------------------------

SummedProfile::SummedProfile(std::vector<std::shared_ptr<const RadialSource>> parts,
                             std::vector<double> weights)
    : parts_(std::move(parts)), w_(std::move(weights)) {
  if (parts_.empty() || parts_.size() != w_.size())
    throw InvalidArgument("SummedProfile: parts and weights must match");
  slots_ = parts_.front()->slots();
  for (const auto& p : parts_) slots_ = std::min(slots_, p->slots());
}

void SummedProfile::eval(double r, Scaled* out) const {
  std::vector<std::array<Scaled, kMaxSlots>> v(parts_.size());
  for (std::size_t i = 0; i < parts_.size(); ++i) parts_[i]->eval(r, v[i].data());
  for (int k = 0; k < slots_; ++k) {
    double mx = -std::numeric_limits<double>::infinity();
    for (const auto& a : v)
      if (a[k].mant != 0.0) mx = std::max(mx, a[k].log_scale);
    if (!std::isfinite(mx)) {
      out[k] = {0.0, 0.0};
      continue;
    }
    double s = 0.0;
    for (std::size_t i = 0; i < v.size(); ++i)
      if (v[i][k].mant != 0.0) s += w_[i] * v[i][k].mant * std::exp(v[i][k].log_scale - mx);
    out[k] = {s, mx};
  }
}

namespace {

class HybridProfile : public RadialSource {
 public:
  HybridProfile(double t, int slots)
      : theta_(1, std::make_shared<const ThetaRule>(theta_rule(WeightKind::Psi, t)), slots),
        mckean_(t, slots) {}
  int slots() const override { return theta_.slots(); }
  void eval(double r, Scaled* out) const override {
    double cond = 0.0;
    theta_.eval(r, out, cond);
    if (cond > 1e6 && r <= McKeanProfile::kMaxRadius) mckean_.eval(r, out);
  }

 private:
  ThetaProfile theta_;
  McKeanProfile mckean_;
};

}  // namespace

std::shared_ptr<const RadialSource> heat_profile(int Q, double t, int slots) {
  if (!(t > 0)) throw InvalidArgument("time must be positive");
  if (t >= kTMin && Q == 1) return std::make_shared<HybridProfile>(t, slots);
  if (t >= kTMin)
    return std::make_shared<ThetaProfile>(
        Q, std::make_shared<const ThetaRule>(theta_rule(WeightKind::Psi, t)), slots);
  if (Q == 1) return std::make_shared<McKeanProfile>(t, slots);
  throw UnsupportedRegime("t < " + std::to_string(kTMin) + " is available for abelian Q = 1 only");
}

KernelField radial_field(const RadialExpr& expr, std::shared_ptr<const RadialSource> src,
                         const GroupDescriptor& g, double time_scale, const QuadratureSpec& qs) {
  if (!g.is_abelian() || g.Q != expr.Q())
    throw UnsupportedRegime("radial calculus needs abelian N matching the expression");
  if (expr.max_slot() >= src->slots()) throw InvalidArgument("radial_field: profile has too few slots");
  KernelField f;
  f.descriptor = g;
  f.quadrature = qs;
  f.time_scale = time_scale;
  f.evaluate = [expr, src, g](const PointG& x) {
    std::array<Scaled, kMaxSlots> sl{};
    src->eval(g_distance(x, g), sl.data());
    return expr.eval(x, sl.data());
  };
  f.on_shell = [expr, src](double r) -> ShellEvaluator {
    std::array<Scaled, kMaxSlots> sl{};
    src->eval(r, sl.data());
    return [expr, sl](const PointG& x) { return expr.eval(x, sl.data()); };
  };
  return f;
}

KernelField radial_norm_field(const std::vector<RadialExpr>& exprs,
                              std::shared_ptr<const RadialSource> src, const GroupDescriptor& g,
                              double time_scale, const QuadratureSpec& qs) {
  if (exprs.empty()) throw InvalidArgument("radial_norm_field: no expressions");
  if (!g.is_abelian()) throw UnsupportedRegime("radial calculus needs abelian N");
  for (const auto& e : exprs)
    if (e.Q() != g.Q || e.max_slot() >= src->slots())
      throw InvalidArgument("radial_norm_field: expression does not fit the profile");
  auto norm = [exprs](const PointG& x, const Scaled* sl) {
    double s = 0.0;
    for (const auto& e : exprs) {
      const double v = e.eval(x, sl);
      s += v * v;
    }
    return std::sqrt(s);
  };
  KernelField f;
  f.descriptor = g;
  f.quadrature = qs;
  f.time_scale = time_scale;
  f.evaluate = [norm, src, g](const PointG& x) {
    std::array<Scaled, kMaxSlots> sl{};
    src->eval(g_distance(x, g), sl.data());
    return norm(x, sl.data());
  };
  f.on_shell = [norm, src](double r) -> ShellEvaluator {
    std::array<Scaled, kMaxSlots> sl{};
    src->eval(r, sl.data());
    return [norm, sl](const PointG& x) { return norm(x, sl.data()); };
  };
  return f;
}

std::shared_ptr<const RadialSource> folded_profile(int Q, double t0, double t1, double p, int slots,
                                                   TimeRule rule) {
  if (!(t0 > 0) || !(t1 > t0)) throw InvalidArgument("folded_profile: need 0 < t0 < t1");
  if (t0 >= kTMin)
    return std::make_shared<ThetaProfile>(
        Q, std::make_shared<const ThetaRule>(theta_rule_time_integrated(WeightKind::Psi, t0, t1, p, rule)),
        slots);
  if (Q != 1) throw UnsupportedRegime("t < " + std::to_string(kTMin) + " is available for abelian Q = 1 only");
  const auto nodes = quad::composite_nodes(t0, t1, 1, 32);
  std::vector<std::shared_ptr<const RadialSource>> parts;
  std::vector<double> w;
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    parts.push_back(std::make_shared<McKeanProfile>(nodes.x[i], slots));
    w.push_back(nodes.w[i] * std::pow(nodes.x[i], p));
  }
  return std::make_shared<SummedProfile>(std::move(parts), std::move(w));
}

}  // namespace naheat
