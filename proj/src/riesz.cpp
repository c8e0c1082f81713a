#include "naheat/riesz.hpp"

#include "naheat/heat_kernel.hpp"
#include "naheat/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace naheat {

namespace {

void check_abelian(const GroupDescriptor& g) {
  if (!g.is_abelian()) throw UnsupportedRegime("Riesz kernels are assembled for abelian N only");
}

double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

IntegralResult abs_integral(const KernelField& f, std::function<double(double)> w = {}) {
  IntegrateOptions opt;
  opt.reduce = Reduce::absolute;
  opt.radial_weight = std::move(w);
  return integrate(f, opt);
}

CzCheck summarize(std::vector<int> n, std::vector<double> values, std::vector<double> normalized,
                  std::vector<IntegralResult> res, double max_spread) {
  CzCheck c;
  c.n = std::move(n);
  c.values = std::move(values);
  c.normalized = std::move(normalized);
  if (c.values.empty()) throw InvalidArgument("CZ check: empty kernel list");
  for (std::size_t i = 0; i < res.size(); ++i)
    if (!res[i].trusted) {
      c.trusted = false;
      c.diagnosis += "n=" + std::to_string(c.n[i]) + ": " + res[i].diagnosis + "; ";
    }
  c.bound = *std::max_element(c.normalized.begin(), c.normalized.end());
  const double med = median(c.normalized);
  c.spread = med > 0 ? c.bound / med : std::numeric_limits<double>::infinity();
  bool finite = true;
  for (double v : c.normalized) finite = finite && std::isfinite(v);
  c.passed = finite && c.trusted && c.spread < max_spread;
  if (c.spread >= max_spread) c.diagnosis += "max/median " + std::to_string(c.spread) + "; ";
  return c;
}

}  // namespace

DyadicKernel dyadic_kernel_first(int n, const std::vector<double>& y, const GroupDescriptor& g,
                                 const QuadratureSpec& qs) {
  check_abelian(g);
  if (static_cast<int>(y.size()) != g.q + 1) throw InvalidArgument("Y needs q+1 coefficients");
  DyadicKernel k;
  k.n = n;
  k.order = KernelOrder::first;
  k.y = y;
  k.t0 = std::ldexp(1.0, n);
  k.t1 = std::ldexp(1.0, n + 1);
  RadialExpr e = RadialExpr::heat(g.Q) * 0.0;
  bool any = false;
  for (int i = 0; i <= g.q; ++i) {
    if (y[i] == 0.0) continue;
    e = any ? e + radial_word(g.Q, {i}) * y[i] : radial_word(g.Q, {i}) * y[i];
    any = true;
  }
  if (!any) throw InvalidArgument("Y must be nonzero");
  k.expr = e;
  k.profile = folded_profile(g.Q, k.t0, k.t1, -0.5, e.max_slot() + 2);
  k.field = radial_field(k.expr, k.profile, g, k.t1, qs);
  return k;
}

DyadicKernel dyadic_kernel(int n, KernelOrder order, int j, int l, const GroupDescriptor& g,
                           const QuadratureSpec& qs) {
  check_abelian(g);
  if (j < 0 || j > g.q) throw InvalidArgument("j out of range");
  if (order == KernelOrder::first) {
    std::vector<double> y(g.q + 1, 0.0);
    y[j] = 1.0;
    DyadicKernel k = dyadic_kernel_first(n, y, g, qs);
    k.j = j;
    return k;
  }
  if (l < 0 || l > g.q) throw InvalidArgument("l out of range");
  DyadicKernel k;
  k.n = n;
  k.order = order;
  k.j = j;
  k.l = l;
  k.t0 = std::ldexp(1.0, n);
  k.t1 = std::ldexp(1.0, n + 1);
  k.expr = radial_word(g.Q, {j, kStar, l});
  k.profile = folded_profile(g.Q, k.t0, k.t1, 0.0, k.expr.max_slot() + 2);
  k.field = radial_field(k.expr, k.profile, g, k.t1, qs);
  return k;
}

std::vector<KernelField> dyadic_star_gradient(const DyadicKernel& k) {
  std::vector<KernelField> out;
  const RadialExpr s = k.expr.star();
  for (int i = 0; i <= k.field.descriptor.q; ++i)
    out.push_back(radial_field(s.apply(i), k.profile, k.field.descriptor, k.t1, k.field.quadrature));
  return out;
}

KernelField dyadic_star_gradient_norm(const DyadicKernel& k) {
  std::vector<RadialExpr> ex;
  const RadialExpr s = k.expr.star();
  for (int i = 0; i <= k.field.descriptor.q; ++i) ex.push_back(s.apply(i));
  return radial_norm_field(ex, k.profile, k.field.descriptor, k.t1, k.field.quadrature);
}

IntegralResult cz_size_value(const DyadicKernel& k, double scale) {
  if (!(scale >= 0)) throw InvalidArgument("scale must be nonnegative");
  if (scale == 0) return abs_integral(k.field);
  return abs_integral(k.field, [scale](double r) { return 1.0 + scale * r; });
}

IntegralResult cz_smoothness_value(const DyadicKernel& k) {
  return abs_integral(dyadic_star_gradient_norm(k));
}

CzCheck cz_size_check(const std::vector<DyadicKernel>& ks, double max_spread) {
  std::vector<int> n;
  std::vector<double> v, nv;
  std::vector<IntegralResult> res;
  for (const auto& k : ks) {
    res.push_back(cz_size_value(k, std::pow(2.0, -0.5 * k.n)));
    n.push_back(k.n);
    v.push_back(res.back().value);
    nv.push_back(res.back().value);
  }
  return summarize(n, v, nv, res, max_spread);
}

CzCheck cz_smoothness_check(const std::vector<DyadicKernel>& ks, double max_spread) {
  std::vector<int> n;
  std::vector<double> v, nv;
  std::vector<IntegralResult> res;
  for (const auto& k : ks) {
    res.push_back(cz_smoothness_value(k));
    n.push_back(k.n);
    v.push_back(res.back().value);
    nv.push_back(res.back().value * std::pow(2.0, 0.5 * k.n));
  }
  return summarize(n, v, nv, res, max_spread);
}

std::string to_string(TailCase c) {
  switch (c) {
    case TailCase::I: return "I";
    case TailCase::II: return "II";
    case TailCase::III: return "III";
    case TailCase::IV: return "IV";
  }
  return "?";
}

namespace {

WeightRules tail_rules(double T) {
  return {std::make_shared<const ThetaRule>(
              theta_rule_time_integrated(WeightKind::Psi, 1.0, T, 0.0, TimeRule::log_composite)),
          std::make_shared<const ThetaRule>(theta_rule(WeightKind::T1, 0.0))};
}

// part fields at a single time t (for the remainder fit) or over [1, T]
std::vector<TailPart> build_parts(const std::vector<int>& word, const WeightRules& rules,
                                  const GroupDescriptor& g, double time_scale,
                                  const QuadratureSpec& qs) {
  std::vector<TailPart> out;
  if (word[0] >= 1 && word[2] >= 1) {
    // case I: one Psi part, route R on the folded profile
    const RadialExpr e = radial_word(g.Q, word);
    auto src = std::make_shared<ThetaProfile>(g.Q, rules.psi, e.max_slot() + 1);
    out.push_back({"K", 1.0, radial_field(e, src, g, time_scale, qs), true});
    return out;
  }
  for (const auto& np : route_a_parts(word, g.Q)) {
    bool psi_only = true;
    for (const auto& a : np.atoms) psi_only = psi_only && a.weight == Weight::Psi;
    // the part field leaves the multiplicity to the caller, as HeatPart does
    NamedPart unit = np;
    unit.multiplicity = 1.0;
    KernelField f = route_a_field({unit}, rules, g, time_scale);
    f.quadrature = qs;
    out.push_back({np.name, np.multiplicity, f, psi_only});
  }
  return out;
}

}  // namespace

TailKernel tail_kernel(int j, int l, const GroupDescriptor& g, double T, const QuadratureSpec& qs) {
  check_abelian(g);
  if (j < 0 || j > g.q || l < 0 || l > g.q) throw InvalidArgument("tail kernel indices out of range");
  if (!(T > 1)) throw InvalidArgument("tail kernel needs T > 1");
  qs.validate();
  TailKernel k;
  k.j = j;
  k.l = l;
  k.T = T;
  k.quadrature = qs;
  if (j >= 1 && l >= 1) {
    k.case_tag = TailCase::I;
    k.word = {j, kStar, l};
  } else if (j >= 1 && l == 0) {
    k.case_tag = TailCase::II;
    k.word = {j, kStar, 0};
  } else if (j == 0 && l >= 1) {
    // (X_l (X_0 h)^*)^* = X_0 (X_l h)^*: involution of case II
    k.case_tag = TailCase::III;
    k.word = {l, kStar, 0};
    k.involuted = true;
  } else {
    k.case_tag = TailCase::IV;
    k.word = {0, kStar, 0};
  }
  const WeightRules rules = tail_rules(T);
  k.parts = build_parts(k.word, rules, g, T, qs);
  if (k.involuted)
    for (auto& p : k.parts) p.field = involution(p.field);
  std::vector<KernelField> fs;
  std::vector<double> mult;
  for (const auto& p : k.parts) {
    fs.push_back(p.field);
    mult.push_back(p.multiplicity);
  }
  k.field = fs.front();
  k.field.evaluate = [fs, mult](const PointG& x) {
    double s = 0.0;
    for (std::size_t i = 0; i < fs.size(); ++i) s += mult[i] * fs[i].evaluate(x);
    return s;
  };
  k.field.on_shell = [fs, mult](double r) -> ShellEvaluator {
    std::vector<ShellEvaluator> ev;
    for (const auto& f : fs) ev.push_back(f.shell(r));
    return [ev, mult](const PointG& x) {
      double s = 0.0;
      for (std::size_t i = 0; i < ev.size(); ++i) s += mult[i] * ev[i](x);
      return s;
    };
  };
  return k;
}

TailNorm tail_l1_norm(const TailKernel& k, bool with_remainder) {
  const IntegralResult r = abs_integral(k.field);
  TailNorm out;
  out.value = r.value;
  out.est_abs_error = r.est_abs_error;
  out.radius = r.radius;
  out.outer_fraction = r.outer_fraction;
  out.trusted = r.trusted;
  out.diagnosis = r.diagnosis;
  if (k.parts.size() > 1)
    for (const auto& p : k.parts) out.part_norms.push_back({p.name, abs_integral(p.field).value});
  if (!with_remainder) return out;
  // Psi parts at single times: ||part_t||_1 t^{3/2} <= C, so Int_T^inf <= 2 C / sqrt(T)
  const GroupDescriptor& g = k.field.descriptor;
  double C = 0.0;
  for (double t : {k.T / 4.0, k.T / 2.0, k.T}) {
    const WeightRules rules = weight_rules(t);
    const auto parts = build_parts(k.word, rules, g, t, k.quadrature);
    std::vector<KernelField> fs;
    std::vector<double> mult;
    for (const auto& p : parts)
      if (p.psi_part) {
        fs.push_back(p.field);
        mult.push_back(p.multiplicity);
      }
    if (fs.empty()) continue;
    double norm = 0.0;
    for (std::size_t i = 0; i < fs.size(); ++i) norm += std::abs(mult[i]) * abs_integral(fs[i]).value;
    C = std::max(C, norm * std::pow(t, 1.5));
  }
  out.remainder = 2.0 * C / std::sqrt(k.T);
  out.remainder_fraction = out.value > 0 ? out.remainder / out.value : std::numeric_limits<double>::infinity();
  out.remainder_ok = out.remainder_fraction < 0.01;
  out.est_abs_error += out.remainder;
  if (!out.remainder_ok)
    out.diagnosis += "time remainder " + std::to_string(100 * out.remainder_fraction) + "% of the partial value; ";
  return out;
}

TailStability tail_stability(const TailKernel& k) {
  TailStability s;
  s.base = tail_l1_norm(k, true);
  TailKernel half = k;
  half.field.quadrature.d_radius = 0.5 * s.base.radius;
  s.half_radius_value = abs_integral(half.field).value;
  s.radius_change = std::abs(s.half_radius_value - s.base.value) / s.base.value;
  const TailKernel k2 = tail_kernel(k.j, k.l, k.field.descriptor, 2.0 * k.T, k.quadrature);
  s.double_T_value = abs_integral(k2.field).value;
  s.T_change = std::abs(s.double_T_value - s.base.value) / s.base.value;
  s.passed = std::isfinite(s.base.value) && s.base.trusted && s.radius_change < 0.05 && s.T_change < 0.05;
  return s;
}

}  // namespace naheat
