#include "naheat/heat_kernel.hpp"

#include "naheat/quadrature.hpp"

#include <gsl/gsl_multifit.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <mutex>
#include <numbers>

namespace naheat {

namespace {

constexpr double kPi = std::numbers::pi;

void check_time_point(double t, const PointG& x, const GroupDescriptor& g) {
  if (!(t > 0) || !std::isfinite(t)) throw InvalidArgument("t must be positive");
  if (x.z.size() != g.dim()) throw InvalidArgument("point dimension does not match the group");
  if (!std::isfinite(x.u)) throw InvalidArgument("u must be finite");
}

void check_index(int j, const GroupDescriptor& g) {
  if (j < 0 || j > g.q) throw InvalidArgument("field index " + std::to_string(j) + " out of range 0.." + std::to_string(g.q));
}

// ---------------------------------------------------------------- route A

Atom atom(double coef, int uexp, Weight w, int k, std::initializer_list<int> zs = {}) {
  Atom a;
  a.coef = coef;
  a.uexp = uexp;
  a.weight = w;
  a.k = k;
  for (int j : zs) a.zexp[j - 1] += 1;
  return a;
}

NamedPart part(std::string name, std::vector<Atom> atoms, double mult = 1.0) {
  std::erase_if(atoms, [](const Atom& a) { return a.coef == 0.0; });
  return {std::move(name), mult, std::move(atoms)};
}

// one theta moment request: rule (0 psi, 1 d), m, P
struct Moment {
  int rule;
  double m, P;
  bool operator<(const Moment& o) const {
    return std::tie(rule, m, P) < std::tie(o.rule, o.m, o.P);
  }
};

struct AtomPlan {
  const Atom* atom = nullptr;
  double mult = 1.0;
  int part = 0;
  int i1 = 0, i2 = -1;        // moment indices; i2 for the bracket's second term
  double lg1 = 0.0, lg2 = 0.0;  // log Gamma factors
};

class RouteA {
 public:
  RouteA(std::vector<NamedPart> parts, WeightRules rules, int Q)
      : parts_(std::move(parts)), rules_(std::move(rules)), Q_(Q) {
    std::map<Moment, int> index;
    auto want = [&](int rule, double m, double P) {
      auto [it, fresh] = index.emplace(Moment{rule, m, P}, 0);
      if (fresh) {
        it->second = static_cast<int>(moments_.size());
        moments_.push_back(it->first);
      }
      return it->second;
    };
    for (std::size_t p = 0; p < parts_.size(); ++p) {
      for (const Atom& a : parts_[p].atoms) {
        const double P = 2.0 + a.k + 0.5 * Q;
        AtomPlan ap;
        ap.atom = &a;
        ap.mult = parts_[p].multiplicity;
        ap.part = static_cast<int>(p);
        switch (a.weight) {
          case Weight::Psi:
            ap.i1 = want(0, 0.0, P);
            ap.lg1 = std::lgamma(P - 1.0);
            break;
          case Weight::D1:
            ap.i1 = want(1, 0.0, P);
            ap.lg1 = std::lgamma(P - 1.0);
            break;
          case Weight::D2:
            // Int xi^{-2} a (cosh/xi - 1) e^{-cosh/xi} xi^{..} e^{-c/xi}: Gamma(P) cosh / (c+cosh)^P - Gamma(P-1) / (c+cosh)^{P-1}
            ap.i1 = want(1, 1.0, P + 1.0);
            ap.lg1 = std::lgamma(P);
            ap.i2 = want(1, 0.0, P);
            ap.lg2 = std::lgamma(P - 1.0);
            break;
        }
        plan_.push_back(ap);
      }
    }
    for (int rule = 0; rule < 2; ++rule) {
      std::vector<double> m, P;
      std::vector<int> idx;
      for (std::size_t i = 0; i < moments_.size(); ++i)
        if (moments_[i].rule == rule) {
          m.push_back(moments_[i].m);
          P.push_back(moments_[i].P);
          idx.push_back(static_cast<int>(i));
        }
      batch_m_[rule] = m;
      batch_P_[rule] = P;
      batch_idx_[rule] = idx;
    }
    if (!batch_idx_[0].empty() && !rules_.psi) throw InvalidArgument("route A: missing Psi rule");
    if (!batch_idx_[1].empty() && !rules_.d) throw InvalidArgument("route A: missing d rule");
  }

  struct Moments {
    std::vector<Scaled> v;
    std::vector<double> cond;
  };

  Moments moments(double r) const {
    Moments out;
    out.v.resize(moments_.size());
    out.cond.resize(moments_.size());
    for (int rule = 0; rule < 2; ++rule) {
      const auto& idx = batch_idx_[rule];
      if (idx.empty()) continue;
      std::vector<Scaled> v(idx.size());
      std::vector<double> c(idx.size());
      theta_moments(rule == 0 ? *rules_.psi : *rules_.d, r, batch_m_[rule].data(),
                    batch_P_[rule].data(), idx.size(), v.data(), c.data());
      for (std::size_t i = 0; i < idx.size(); ++i) {
        out.v[idx[i]] = v[i];
        out.cond[idx[i]] = c[i];
      }
    }
    return out;
  }

  // total value; per-part values and an error estimate on request
  double value(const PointG& x, const Moments& mo, std::vector<double>* part_values = nullptr,
               double* err = nullptr) const {
    std::array<double, kMaxDim> lz{};
    std::array<int, kMaxDim> sz{};
    for (int i = 0; i < Q_; ++i) {
      lz[i] = x.z[i] == 0.0 ? -std::numeric_limits<double>::infinity() : std::log(std::abs(x.z[i]));
      sz[i] = x.z[i] < 0 ? -1 : 1;
    }
    const double base = -0.5 * Q_ * (std::log(2.0 * kPi) + x.u);
    if (part_values) part_values->assign(parts_.size(), 0.0);
    double total = 0.0, e = 0.0;
    for (const AtomPlan& ap : plan_) {
      const Atom& a = *ap.atom;
      double lg = base + a.uexp * x.u;
      int sg = a.coef < 0 ? -1 : 1;
      bool zero = false;
      for (int i = 0; i < Q_; ++i) {
        if (!a.zexp[i]) continue;
        if (x.z[i] == 0.0) zero = true;
        lg += a.zexp[i] * lz[i];
        if (a.zexp[i] % 2) sg *= sz[i];
      }
      if (zero) continue;
      auto term = [&](int i, double lgam) {
        const Scaled& s = mo.v[i];
        if (s.mant == 0.0) return 0.0;
        const double v = sg * std::abs(a.coef) * s.mant * std::exp(lg + lgam + s.log_scale);
        e += std::abs(v) * 4e-16 * std::max(1.0, mo.cond[i]);
        return v;
      };
      double v = term(ap.i1, ap.lg1);
      if (ap.i2 >= 0) v -= term(ap.i2, ap.lg2);
      if (part_values) (*part_values)[ap.part] += v;
      total += ap.mult * v;
    }
    if (err) *err = e + 1e-13 * std::abs(total);
    return total;
  }

  const std::vector<NamedPart>& parts() const { return parts_; }

 private:
  std::vector<NamedPart> parts_;
  WeightRules rules_;
  int Q_;
  std::vector<Moment> moments_;
  std::vector<AtomPlan> plan_;
  std::array<std::vector<double>, 2> batch_m_, batch_P_;
  std::array<std::vector<int>, 2> batch_idx_;
};

HeatEval route_a_eval(const std::vector<int>& word, double t, const PointG& x,
                      const GroupDescriptor& g) {
  const RouteA ra(route_a_parts(word, g.Q), weight_rules(t), g.Q);
  const auto mo = ra.moments(g_distance(x, g));
  HeatEval ev;
  ev.t = t;
  ev.x = x;
  ev.route = "A";
  std::vector<double> pv;
  ev.value = ra.value(x, mo, &pv, &ev.est_abs_error);
  if (ra.parts().size() > 1)
    for (std::size_t i = 0; i < pv.size(); ++i)
      ev.parts.push_back({ra.parts()[i].name, ra.parts()[i].multiplicity, pv[i]});
  return ev;
}

HeatEval route_r_eval(const std::vector<int>& word, double t, const PointG& x,
                      const GroupDescriptor& g) {
  const RadialExpr e = radial_word(g.Q, word);
  const auto src = heat_profile(g.Q, t, e.max_slot() + 1);
  std::array<Scaled, kMaxRadialSlots> sl{};
  src->eval(g_distance(x, g), sl.data());
  HeatEval ev;
  ev.t = t;
  ev.x = x;
  ev.route = "R";
  double a = 0.0;
  ev.value = e.eval(x, sl.data(), &a);
  ev.est_abs_error = 1e-14 * a + 1e-12 * std::abs(ev.value);
  return ev;
}

// ---------------------------------------------------------------- route B

struct XiTable {
  std::vector<double> xi, w;  // w includes Psi_t(xi) and the log-xi Jacobian
};

const XiTable& xi_table(double t) {
  static std::mutex mutex;
  static std::map<double, std::shared_ptr<XiTable>> cache;
  {
    std::lock_guard lock(mutex);
    auto it = cache.find(t);
    if (it != cache.end()) return *it->second;
  }
  auto tab = std::make_shared<XiTable>();
  const auto nodes = quad::composite_nodes(quad::panel_breaks(-8.0, 60.0, 0.25), 8);
  tab->xi.resize(nodes.size());
  tab->w.resize(nodes.size());
  const long long n = static_cast<long long>(nodes.size());
#pragma omp parallel for schedule(dynamic, 16)
  for (long long i = 0; i < n; ++i) {
    const double xi = std::exp(nodes.x[i]);
    tab->xi[i] = xi;
    tab->w[i] = nodes.w[i] * xi * psi(t, xi, 1e-11).value;
  }
  std::lock_guard lock(mutex);
  auto [it, fresh] = cache.emplace(t, tab);
  return *it->second;
}

// Sum over xi nodes of w Psi e^{-cosh u/xi} * kernel(xi, s = e^u xi / 2)
template <class K>
double xi_sum(double t, const PointG& x, const GroupDescriptor& g, K&& kernel) {
  if (t < kTMin) throw UnsupportedRegime("xi-outer evaluation needs t >= " + std::to_string(kTMin));
  const XiTable& tab = xi_table(t);
  const double ch = std::cosh(x.u);
  // cheap bound |w Psi| e^{-cosh u/xi} (1 + cosh u/xi) s^{-Q/2} to skip dead nodes
  std::vector<double> bound(tab.xi.size());
  double mx = 0.0;
  for (std::size_t i = 0; i < tab.xi.size(); ++i) {
    const double a = ch / tab.xi[i];
    if (a > 700.0) continue;
    const double s = 0.5 * std::exp(x.u) * tab.xi[i];
    bound[i] = std::abs(tab.w[i]) * std::exp(-a) * (1.0 + a) * std::pow(s, -0.5 * g.Q);
    mx = std::max(mx, bound[i]);
  }
  double sum = 0.0;
  for (std::size_t i = 0; i < tab.xi.size(); ++i) {
    if (bound[i] <= 1e-17 * mx) continue;
    const double xi = tab.xi[i];
    sum += tab.w[i] * std::exp(-ch / xi) * kernel(xi, 0.5 * std::exp(x.u) * xi);
  }
  return sum;
}

HeatEval route_b(double value, double t, const PointG& x) {
  HeatEval ev;
  ev.t = t;
  ev.x = x;
  ev.value = value;
  ev.est_abs_error = 1e-8 * std::abs(value) + 1e-14;
  ev.route = "B";
  return ev;
}

std::mutex rules_mutex;
std::map<double, WeightRules> rules_cache;

}  // namespace

// ---------------------------------------------------------------- decompositions

std::vector<NamedPart> route_a_parts(const std::vector<int>& w, int Q) {
  using W = Weight;
  auto in = [&](int j) { return j >= 1 && j <= Q; };
  const auto S = kStar;
  if (w.empty()) return {part("", {atom(1, 0, W::Psi, 0)})};
  if (w.size() == 1 && in(w[0])) return {part("", {atom(-1, 0, W::Psi, 1, {w[0]})})};
  if (w.size() == 1 && w[0] == 0)
    return {part("I1", {atom(-1, 1, W::Psi, 1)}), part("I2", {atom(-1, 0, W::D1, 0)})};
  if (w.size() == 2 && w[0] == S) {
    const int j = w[1];
    if (in(j)) return {part("", {atom(1, -1, W::Psi, 1, {j})})};
    if (j == 0)
      return {part("I1", {atom(-1, -1, W::Psi, 1)}), part("I2", {atom(-1, 0, W::D1, 0)})};
  }
  if (w.size() == 3 && w[1] == S && w[0] != S && w[2] != S) {
    const int j = w[0], l = w[2];
    if (in(j) && in(l))
      return {part("", {atom(j == l ? 1.0 : 0.0, 0, W::Psi, 1), atom(-1, -1, W::Psi, 2, {j, l})})};
    if (in(j) && l == 0)
      return {part("I1", {atom(1, -1, W::Psi, 2, {j})}), part("I2", {atom(1, 0, W::D1, 1, {j})})};
    if (j == 0 && in(l))
      return {part("I1", {atom(-1, 0, W::Psi, 2, {l})}), part("I2", {atom(-1, -1, W::D1, 1, {l})})};
    if (j == 0 && l == 0)
      return {part("J1", {atom(1, 0, W::Psi, 2)}),
              part("J2", {atom(0.5, 1, W::D1, 1), atom(0.5, -1, W::D1, 1)}, 2.0),
              part("J3", {atom(1, 0, W::D2, 0)})};
  }
  if (w.size() == 4 && w[1] == 0 && w[2] == S && in(w[0]) && in(w[3])) {
    const int l = w[0], j = w[3];
    const double d = j == l ? 1.0 : 0.0;
    return {part("I1", {atom(-d, 1, W::Psi, 2), atom(1, 0, W::Psi, 3, {j, l})}),
            part("I2", {atom(-d, 0, W::D1, 1), atom(1, -1, W::D1, 2, {j, l})})};
  }
  throw InvalidArgument("word has no closed-form xi split");
}

bool has_route_a(const std::vector<int>& word, int Q) {
  try {
    route_a_parts(word, Q);
    return true;
  } catch (const InvalidArgument&) {
    return false;
  }
}

WeightRules weight_rules(double t) {
  {
    std::lock_guard lock(rules_mutex);
    auto it = rules_cache.find(t);
    if (it != rules_cache.end()) return it->second;
  }
  WeightRules r{std::make_shared<const ThetaRule>(theta_rule(WeightKind::Psi, t)),
                std::make_shared<const ThetaRule>(theta_rule(WeightKind::D1, t))};
  std::lock_guard lock(rules_mutex);
  if (rules_cache.size() > 64) rules_cache.clear();
  rules_cache.emplace(t, r);
  return r;
}

KernelField route_a_field(const std::vector<NamedPart>& parts, const WeightRules& rules,
                          const GroupDescriptor& g, double time_scale,
                          const std::vector<std::string>& names) {
  if (!g.is_abelian()) throw UnsupportedRegime("closed-form xi split needs abelian N");
  std::vector<NamedPart> sel;
  for (const auto& p : parts)
    if (names.empty() || std::find(names.begin(), names.end(), p.name) != names.end())
      sel.push_back(p);
  if (sel.empty()) throw InvalidArgument("route_a_field: no part selected");
  auto ra = std::make_shared<const RouteA>(sel, rules, g.Q);
  KernelField f;
  f.descriptor = g;
  f.time_scale = time_scale;
  f.evaluate = [ra, g](const PointG& x) { return ra->value(x, ra->moments(g_distance(x, g))); };
  f.on_shell = [ra](double r) -> ShellEvaluator {
    auto mo = std::make_shared<const RouteA::Moments>(ra->moments(r));
    return [ra, mo](const PointG& x) { return ra->value(x, *mo); };
  };
  return f;
}

KernelField heat_field(const std::vector<int>& word, double t, const GroupDescriptor& g,
                       const QuadratureSpec& qs) {
  if (!g.is_abelian()) throw UnsupportedRegime("kernel fields for integration need abelian N");
  const RadialExpr e = radial_word(g.Q, word);
  return radial_field(e, heat_profile(g.Q, t, e.max_slot() + 1), g, t, qs);
}

std::vector<KernelField> gradient_fields(const std::vector<int>& word, double t,
                                         const GroupDescriptor& g, const QuadratureSpec& qs) {
  std::vector<KernelField> out;
  for (int i = 0; i <= g.q; ++i) {
    std::vector<int> w{i};
    w.insert(w.end(), word.begin(), word.end());
    out.push_back(heat_field(w, t, g, qs));
  }
  return out;
}

// ---------------------------------------------------------------- route B

double h_xi_direct(double t, const PointG& x, const GroupDescriptor& g) {
  check_time_point(t, x, g);
  return xi_sum(t, x, g, [&](double, double s) { return n_heat(s, x.z, g); });
}

double h_derivative_xi_direct(int j, double t, const PointG& x, const GroupDescriptor& g) {
  check_time_point(t, x, g);
  check_index(j, g);
  if (j >= 1) {
    const double eu = std::exp(x.u);
    return xi_sum(t, x, g, [&](double, double s) {
      return eu * n_heat_derivative({j}, {}, s, x.z, g);
    });
  }
  // d/du [e^{-cosh u/xi} h_{e^u xi/2}(z)] = e^{..} [-sinh u/xi h + s d_s h], d_s h = Sum X_i^2 h
  const double sh = std::sinh(x.u);
  return xi_sum(t, x, g, [&](double xi, double s) {
    double lap = 0.0;
    for (int i = 1; i <= g.q; ++i) lap += n_heat_derivative({i, i}, {}, s, x.z, g);
    return -sh / xi * n_heat(s, x.z, g) + s * lap;
  });
}

// ---------------------------------------------------------------- public ops

HeatEval h_word(const std::vector<int>& word, double t, const PointG& x, const GroupDescriptor& g) {
  check_time_point(t, x, g);
  for (int j : word)
    if (j != kStar) check_index(j, g);
  if (!g.is_abelian()) throw UnsupportedRegime("symbolic derivative words need abelian N");
  return route_r_eval(word, t, x, g);
}

namespace {

HeatEval abelian_eval(const std::vector<int>& word, double t, const PointG& x,
                      const GroupDescriptor& g) {
  if (t >= kTMin && has_route_a(word, g.Q)) return route_a_eval(word, t, x, g);
  return route_r_eval(word, t, x, g);
}

}  // namespace

HeatEval h(double t, const PointG& x, const GroupDescriptor& g) {
  check_time_point(t, x, g);
  if (g.is_abelian()) return abelian_eval({}, t, x, g);
  return route_b(h_xi_direct(t, x, g), t, x);
}

HeatEval h_derivative(int j, double t, const PointG& x, const GroupDescriptor& g) {
  check_time_point(t, x, g);
  check_index(j, g);
  if (g.is_abelian()) return abelian_eval({j}, t, x, g);
  return route_b(h_derivative_xi_direct(j, t, x, g), t, x);
}

HeatEval h_star_derivative(int j, double t, const PointG& x, const GroupDescriptor& g) {
  check_time_point(t, x, g);
  check_index(j, g);
  if (g.is_abelian()) return abelian_eval({kStar, j}, t, x, g);
  // no closed form on non-abelian N: involution of the xi-outer value
  HeatEval ev = route_b(modular(x, g) * h_derivative_xi_direct(j, t, g_inverse(x, g), g), t, x);
  return ev;
}

HeatEval h_second_star(int j, int l, double t, const PointG& x, const GroupDescriptor& g) {
  check_time_point(t, x, g);
  check_index(j, g);
  check_index(l, g);
  if (g.is_abelian()) return abelian_eval({j, kStar, l}, t, x, g);
  auto f = [&](const PointG& y) {
    return modular(y, g) * h_derivative_xi_direct(l, t, g_inverse(y, g), g);
  };
  HeatEval ev = route_b(frame_derivative_fd(f, j, x, g, 1e-3 * std::max(1.0, std::sqrt(t))), t, x);
  ev.est_abs_error = 1e-5 * std::abs(ev.value) + 1e-12;
  ev.route = "B+FD";
  return ev;
}

HeatEval h_third_star(int l, int k, int j, double t, const PointG& x, const GroupDescriptor& g) {
  check_time_point(t, x, g);
  check_index(j, g);
  check_index(k, g);
  check_index(l, g);
  if (!g.is_abelian()) throw UnsupportedRegime("third-order derivatives need abelian N");
  return abelian_eval({l, k, kStar, j}, t, x, g);
}

// ---------------------------------------------------------------- small-time fit

BoundFit small_time_bound_fit(const MultiIndex& alpha, const std::vector<double>& t_grid,
                              const std::vector<PointG>& x_grid, const GroupDescriptor& g) {
  if (!g.is_abelian() || g.Q != 1) throw UnsupportedRegime("small-time fit: abelian Q = 1 only");
  check_multi_index(alpha, g.q, true);
  if (t_grid.empty() || x_grid.empty()) throw InvalidArgument("small-time fit: empty grid");
  const RadialExpr e = radial_word(1, alpha);
  const double order = 0.5 * (g.Q + 1 + static_cast<double>(alpha.size()));
  struct Sample {
    double t, r2, v;
  };
  std::vector<Sample> samples;
  for (double t : t_grid) {
    if (!(t > 0)) throw InvalidArgument("small-time fit: t must be positive");
    const auto src = heat_profile(1, t, e.max_slot() + 1);
    for (const PointG& x : x_grid) {
      const double r = g_distance(x, g);
      std::array<Scaled, kMaxRadialSlots> sl{};
      src->eval(r, sl.data());
      samples.push_back({t, r * r, std::abs(e.eval(x, sl.data()))});
    }
  }
  // log v + order log t = log C + omega t - b r^2/t, fitted on the nonzero samples
  std::vector<const Sample*> use;
  for (const auto& s : samples)
    if (s.v > 1e-280) use.push_back(&s);
  if (use.size() < 4) throw InvalidArgument("small-time fit: fewer than 4 usable samples");
  gsl_matrix* X = gsl_matrix_alloc(use.size(), 3);
  gsl_vector* y = gsl_vector_alloc(use.size());
  gsl_vector* c = gsl_vector_alloc(3);
  gsl_matrix* cov = gsl_matrix_alloc(3, 3);
  gsl_multifit_linear_workspace* ws = gsl_multifit_linear_alloc(use.size(), 3);
  for (std::size_t i = 0; i < use.size(); ++i) {
    gsl_matrix_set(X, i, 0, 1.0);
    gsl_matrix_set(X, i, 1, use[i]->t);
    gsl_matrix_set(X, i, 2, -use[i]->r2 / use[i]->t);
    gsl_vector_set(y, i, std::log(use[i]->v) + order * std::log(use[i]->t));
  }
  double chisq = 0.0;
  gsl_multifit_linear(X, y, c, cov, &chisq, ws);
  BoundFit fit;
  fit.omega = gsl_vector_get(c, 1);
  fit.b = std::clamp(gsl_vector_get(c, 2), 1e-6, 0.25);
  gsl_multifit_linear_free(ws);
  gsl_matrix_free(cov);
  gsl_vector_free(c);
  gsl_vector_free(y);
  gsl_matrix_free(X);
  double lc = -std::numeric_limits<double>::infinity();
  for (const auto& s : samples) {
    if (s.v <= 0) continue;
    lc = std::max(lc, std::log(s.v) + order * std::log(s.t) - fit.omega * s.t + fit.b * s.r2 / s.t);
  }
  // the log/exp round trip loses a few ulps; nudge C so the bound holds in floating point too
  fit.C = std::exp(lc) * (1 + 1e-12);
  fit.points = samples.size();
  for (const auto& s : samples) {
    const double bound = fit.C * std::pow(s.t, -order) * std::exp(fit.omega * s.t - fit.b * s.r2 / s.t);
    fit.max_violation = std::max(fit.max_violation, s.v / bound);
  }
  return fit;
}

}  // namespace naheat
