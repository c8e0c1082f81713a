#include "naheat/checks.hpp"

#include "naheat/heat_kernel.hpp"
#include "naheat/quadrature.hpp"
#include "naheat/subordination.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <map>
#include <random>

namespace naheat {

namespace {

double rel_err(double a, double b, double floor = 1e-300) {
  return std::abs(a - b) / std::max({std::abs(b), floor});
}

CheckResult make(const std::string& suite, const std::string& name) {
  CheckResult c;
  c.suite = suite;
  c.id = suite + "." + name;
  return c;
}

std::vector<PointG> random_points(const GroupDescriptor& g, std::uint64_t seed, int n, double zmax, double umax) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> uz(-zmax, zmax), uu(-umax, umax);
  std::vector<PointG> pts;
  for (int i = 0; i < n; ++i) {
    PointG x{PointN(g.dim()), 0.0};
    for (int k = 0; k < g.dim(); ++k) x.z[k] = uz(rng);
    x.u = uu(rng);
    pts.push_back(x);
  }
  return pts;
}

Json point_json(const PointG& x) {
  Json z = Json::array();
  for (int k = 0; k < x.z.n; ++k) z.push_back(x.z[k]);
  return {{"z", z}, {"u", x.u}};
}

void require_abelian(const SuiteOptions& opt, const char* what) {
  if (!opt.group.is_abelian()) throw UnsupportedRegime(std::string(what) + ": abelian N only");
}

}  // namespace

std::vector<double> dyadic_grid(double t_min, double t_max) {
  if (!(t_min > 0) || !(t_max >= t_min)) throw InvalidArgument("need 0 < t_min <= t_max");
  std::vector<double> t;
  for (int n = static_cast<int>(std::ceil(std::log2(t_min) - 1e-9)); std::ldexp(1.0, n) <= t_max * (1 + 1e-12); ++n)
    t.push_back(std::ldexp(1.0, n));
  if (t.size() < 4) throw InvalidArgument("decay grid needs at least 4 powers of two in [t_min, t_max]");
  return t;
}

// --- geometry ---

CheckResult check_distance_formula(const SuiteOptions& opt, int samples) {
  CheckResult c = make("geometry", "distance_formula");
  const GroupDescriptor& g = opt.group;
  if (!g.is_abelian() || g.Q != 1) throw UnsupportedRegime("distance formula oracle: abelian Q = 1");
  // (z, u) -> z + i e^u maps G isometrically onto the upper half plane
  auto pts = random_points(g, opt.seed, 2 * samples, 5.0, 3.0);
  double worst = 0.0;
  for (int i = 0; i < samples; ++i) {
    const PointG& x = pts[2 * i];
    const PointG& y = pts[2 * i + 1];
    const double ax = x.z[0], bx = std::exp(x.u), ay = y.z[0], by = std::exp(y.u);
    const double dx = ax - ay, dy = bx - by;
    const double poincare = std::acosh(1.0 + (dx * dx + dy * dy) / (2.0 * bx * by));
    worst = std::max(worst, std::abs(g_distance(x, y, g) - poincare));
  }
  c.passed = worst < 1e-12;
  c.record["params"] = {{"samples", samples}, {"seed", opt.seed}};
  c.record["values"] = {number(worst)};
  c.record["tolerance"] = 1e-12;
  if (!c.passed) c.diagnosis = "max abs error " + std::to_string(worst);
  return c;
}

CheckResult check_group_laws(const SuiteOptions& opt) {
  CheckResult c = make("geometry", "group_laws");
  const GroupDescriptor& g = opt.group;
  auto pts = random_points(g, opt.seed + 1, 300, 2.0, 2.0);
  double assoc = 0, inv = 0, mod = 0, inv_d = 0, sym = 0;
  for (int i = 0; i + 2 < 300; i += 3) {
    const PointG &x = pts[i], &y = pts[i + 1], &w = pts[i + 2];
    const PointG a = g_multiply(g_multiply(x, y, g), w, g);
    const PointG b = g_multiply(x, g_multiply(y, w, g), g);
    double d = std::abs(a.u - b.u);
    for (int k = 0; k < g.dim(); ++k) d = std::max(d, std::abs(a.z[k] - b.z[k]));
    assoc = std::max(assoc, d);
    const PointG e = g_multiply(x, g_inverse(x, g), g);
    d = std::abs(e.u);
    for (int k = 0; k < g.dim(); ++k) d = std::max(d, std::abs(e.z[k]));
    inv = std::max(inv, d);
    mod = std::max(mod, rel_err(modular(g_multiply(x, y, g), g), modular(x, g) * modular(y, g)));
    inv_d = std::max(inv_d, std::abs(g_distance(g_multiply(w, x, g), g_multiply(w, y, g), g) - g_distance(x, y, g)));
    sym = std::max(sym, std::abs(g_distance(x, y, g) - g_distance(y, x, g)));
  }
  c.record["values"] = numbers({assoc, inv, mod, inv_d, sym});
  c.record["value_labels"] = {"associativity", "inverse", "modular_homomorphism", "left_invariance", "symmetry"};
  c.passed = assoc < 1e-12 && inv < 1e-12 && mod < 1e-12 && inv_d < 1e-9 && sym < 1e-9;
  if (!c.passed) c.diagnosis = "group law residual above tolerance";
  return c;
}

CheckResult check_radial_density(const SuiteOptions& opt) {
  CheckResult c = make("geometry", "radial_density");
  const GroupDescriptor& g = opt.group;
  std::vector<double> R{1.0, 2.0, 3.0}, ratio;
  for (double r : R) {
    // Int_0^R sinh^Q
    const double shell = g.Q == 1 ? std::cosh(r) - 1.0
                                  : quad::adaptive([&](double s) { return std::pow(std::sinh(s), g.Q); }, 0.0, r, 1e-13).value;
    ratio.push_back(ball_volume_direct(r, g) / shell);
  }
  const auto [lo, hi] = std::minmax_element(ratio.begin(), ratio.end());
  const double spread = *hi / *lo - 1.0;
  const double cn = estimate_CN(g);
  const double off = rel_err(ratio[0], cn);
  c.record["params"] = {{"R", R}};
  c.record["values"] = numbers(ratio);
  c.record["constant"] = number(cn);
  c.record["spread"] = number(spread);
  c.passed = spread < 1e-3 && off < 1e-3;
  if (!c.passed) c.diagnosis = "ratio spread " + std::to_string(spread) + ", off C_N by " + std::to_string(off);
  return c;
}

// --- subordination ---

CheckResult check_psi_mass(const SuiteOptions&) {
  CheckResult c = make("subordination", "psi_mass");
  std::vector<double> t{0.25, 1.0, 4.0}, m;
  double worst = 0.0;
  for (double s : t) {
    m.push_back(psi_mass(s));
    worst = std::max(worst, std::abs(m.back() - 1.0));
  }
  c.record["t"] = t;
  c.record["values"] = numbers(m);
  c.passed = worst < 1e-6;
  if (!c.passed) c.diagnosis = "mass off 1 by " + std::to_string(worst);
  return c;
}

CheckResult check_time_integral_identity(const SuiteOptions&) {
  CheckResult c = make("subordination", "time_integral_identity");
  std::vector<double> xi{0.5, 1.0, 2.0, 8.0}, lhs, rhs, errs;
  double worst = 0.0;
  for (double x : xi) {
    const PsiEval part = psi_xi_derivative_time_integral(1.0, 200.0, x);
    const PsiEval tail = psi_xi_derivative_tail(200.0, x);
    const PsiEval closed = psi_time_integrated(x);
    lhs.push_back(part.value + tail.value);
    rhs.push_back(closed.value);
    errs.push_back(part.est_abs_error + tail.est_abs_error + closed.est_abs_error);
    worst = std::max(worst, rel_err(lhs.back(), rhs.back()));
  }
  c.record["params"] = {{"xi", xi}, {"T", 200}};
  c.record["values"] = numbers(lhs);
  c.record["closed"] = numbers(rhs);
  c.record["est_abs_errors"] = numbers(errs);
  c.record["max_rel_error"] = number(worst);
  c.passed = worst < 1e-5;
  if (!c.passed) c.diagnosis = "relative mismatch " + std::to_string(worst);
  return c;
}

// --- heat ---

CheckResult check_heat_mass(const SuiteOptions& opt) {
  CheckResult c = make("heat", "mass");
  require_abelian(opt, "heat mass");
  std::vector<double> t{1.0, 4.0, 16.0}, m, e;
  double worst = 0.0;
  for (double s : t) {
    IntegrateOptions io;
    io.reduce = Reduce::signed_value;
    const IntegralResult r = integrate(heat_field({}, s, opt.group, opt.quadrature), io);
    m.push_back(r.value);
    e.push_back(r.est_abs_error);
    worst = std::max(worst, std::abs(r.value - 1.0));
  }
  c.record["t"] = t;
  c.record["values"] = numbers(m);
  c.record["est_abs_errors"] = numbers(e);
  c.passed = worst < 1e-4;
  if (!c.passed) c.diagnosis = "mass off 1 by " + std::to_string(worst);
  return c;
}

CheckResult check_semigroup(const SuiteOptions& opt) {
  CheckResult c = make("heat", "semigroup");
  require_abelian(opt, "semigroup");
  const GroupDescriptor& g = opt.group;
  const double t = 1.0;
  const KernelField f = heat_field({}, t, g, opt.quadrature);
  std::vector<PointG> pts;
  for (auto [z, u] : std::vector<std::pair<double, double>>{{0, 0}, {0.5, 0.3}, {-1, -0.7}, {1.5, 1}, {0.2, -1.5}}) {
    PointG x{PointN(g.dim()), u};
    x.z[0] = z;
    pts.push_back(x);
  }
  std::vector<double> conv, direct;
  double worst = 0.0;
  Json where = Json::array();
  for (const auto& x : pts) {
    conv.push_back(convolve_at(f, f, x).value);
    direct.push_back(h(2 * t, x, g).value);
    worst = std::max(worst, rel_err(conv.back(), direct.back()));
    where.push_back(point_json(x));
  }
  c.record["params"] = {{"t", t}, {"points", where}};
  c.record["values"] = numbers(conv);
  c.record["direct"] = numbers(direct);
  c.record["max_rel_error"] = number(worst);
  c.passed = worst < 1e-3;
  if (!c.passed) c.diagnosis = "h_t * h_t off h_2t by " + std::to_string(worst);
  return c;
}

CheckResult check_heat_symmetry(const SuiteOptions& opt) {
  CheckResult c = make("heat", "symmetry");
  const GroupDescriptor& g = opt.group;
  auto pts = random_points(g, opt.seed + 2, 8, 2.0, 1.5);
  double worst = 0.0;
  for (const auto& x : pts) {
    const double a = h(1.0, x, g).value;
    const double b = modular(x, g) * h(1.0, g_inverse(x, g), g).value;
    worst = std::max(worst, rel_err(a, b));
  }
  c.record["values"] = {number(worst)};
  c.passed = worst < 1e-8;
  if (!c.passed) c.diagnosis = "h^* differs from h by " + std::to_string(worst);
  return c;
}

CheckResult check_routes(const SuiteOptions& opt) {
  CheckResult c = make("heat", "routes");
  require_abelian(opt, "route comparison");
  const GroupDescriptor& g = opt.group;
  auto pts = random_points(g, opt.seed + 3, 6, 2.0, 1.5);
  double ar = 0, ab = 0, dab = 0;
  for (double t : {0.5, 2.0}) {
    for (const auto& x : pts) {
      const double a = h(t, x, g).value;
      ar = std::max(ar, rel_err(h_word({}, t, x, g).value, a));
      ab = std::max(ab, rel_err(h_xi_direct(t, x, g), a));
      dab = std::max(dab, rel_err(h_derivative_xi_direct(0, t, x, g), h_derivative(0, t, x, g).value));
    }
  }
  c.record["values"] = numbers({ar, ab, dab});
  c.record["value_labels"] = {"R_vs_A", "B_vs_A", "B_vs_A_X0"};
  c.passed = ar < 1e-8 && ab < 1e-8 && dab < 1e-8;
  if (!c.passed) c.diagnosis = "evaluation routes disagree";
  return c;
}

CheckResult check_derivatives_fd(const SuiteOptions& opt) {
  CheckResult c = make("heat", "derivatives_fd");
  const GroupDescriptor& g = opt.group;
  const bool ab = g.is_abelian();
  auto pts = random_points(g, opt.seed + 4, 6, 1.5, 1.0);
  std::vector<double> times = ab ? std::vector<double>{0.5, 2.0} : std::vector<double>{1.0};
  if (ab && g.Q == 1) times.insert(times.begin(), 0.1);
  struct Op {
    std::string name;
    double tol;
    double max_rel = 0.0;
  };
  std::vector<Op> ops;
  // error relative to the FD value, floored at 1e-3 of the largest value of the op, so sign
  // changes of a derivative do not blow up the ratio
  auto run = [&](const std::string& name, double tol, const std::function<double(const PointG&)>& analytic,
                 const std::function<double(const PointG&)>& fd, const std::vector<PointG>& at) {
    std::vector<double> a, b;
    double scale = 0.0;
    for (const auto& x : at) {
      a.push_back(analytic(x));
      b.push_back(fd(x));
      scale = std::max(scale, std::abs(b.back()));
    }
    double worst = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) worst = std::max(worst, rel_err(a[i], b[i], 1e-3 * scale));
    auto it = std::find_if(ops.begin(), ops.end(), [&](const Op& o) { return o.name == name; });
    if (it == ops.end()) ops.push_back({name, tol, worst});
    else it->max_rel = std::max(it->max_rel, worst);
  };
  const double step = ab ? 1e-4 : 1e-3;
  for (double t : times) {
    auto H = [&](const PointG& x) { return h(t, x, g).value; };
    for (int j = 0; j <= g.q; ++j) {
      run("X_j h", 1e-5, [&](const PointG& x) { return h_derivative(j, t, x, g).value; },
          [&](const PointG& x) { return frame_derivative_fd(H, j, x, g, step * std::max(1.0, std::sqrt(t))); }, pts);
      run("(X_j h)^*", 1e-5, [&](const PointG& x) { return h_star_derivative(j, t, x, g).value; },
          [&](const PointG& x) {
            return modular(x, g) * frame_derivative_fd(H, j, g_inverse(x, g), g, step * std::max(1.0, std::sqrt(t)));
          },
          pts);
    }
    if (!ab) continue;  // higher orders on Heisenberg are finite differences already
    for (int j = 0; j <= g.q; ++j)
      for (int l = 0; l <= g.q; ++l) {
        auto S = [&](const PointG& x) { return h_star_derivative(l, t, x, g).value; };
        run("X_j (X_l h)^*", 1e-4, [&](const PointG& x) { return h_second_star(j, l, t, x, g).value; },
            [&](const PointG& x) { return frame_derivative_fd(S, j, x, g, step); }, pts);
        for (int k = 0; k <= g.q; ++k) {
          auto S2 = [&](const PointG& x) { return h_second_star(k, j, t, x, g).value; };
          run("X_l X_k (X_j h)^*", 1e-3, [&](const PointG& x) { return h_third_star(l, k, j, t, x, g).value; },
              [&](const PointG& x) { return frame_derivative_fd(S2, l, x, g, step); }, pts);
        }
      }
  }
  if (ab) {
    // star gradients of dyadic kernels against differences of the involuted field
    std::vector<PointG> few(pts.begin(), pts.begin() + 5);
    std::vector<DyadicKernel> ks{dyadic_kernel(0, KernelOrder::first, 1, 0, g, opt.quadrature)};
    if (g.Q == 1) ks.push_back(dyadic_kernel(-2, KernelOrder::second, 1, 1, g, opt.quadrature));
    for (const auto& k : ks) {
      const auto grad = dyadic_star_gradient(k);
      const KernelField star = involution(k.field);
      for (int i = 0; i <= g.q; ++i)
        run("grad_H k_n^*", 1e-3, [&](const PointG& x) { return grad[i](x); },
            [&](const PointG& x) { return frame_derivative_fd(star.evaluate, i, x, g, step); }, few);
    }
  }
  Json names = Json::array(), tols = Json::array();
  std::vector<double> errs;
  c.passed = true;
  for (const auto& o : ops) {
    names.push_back(o.name);
    tols.push_back(o.tol);
    errs.push_back(o.max_rel);
    if (!(o.max_rel <= o.tol)) {
      c.passed = false;
      c.diagnosis += o.name + " off by " + std::to_string(o.max_rel) + "; ";
    }
  }
  c.record["params"] = {{"t", times}, {"points", static_cast<int>(pts.size())}, {"seed", opt.seed}};
  c.record["value_labels"] = names;
  c.record["tolerances"] = tols;
  c.record["values"] = numbers(errs);
  return c;
}

// --- estimates ---

CheckResult check_decay(Proposition p, const SuiteOptions& opt, bool small_t) {
  require_abelian(opt, "decay checks");
  std::vector<double> grid = small_t ? dyadic_grid(1.0 / 64, 0.5) : dyadic_grid(opt.t_min, opt.t_max);
  const bool first = p == Proposition::P3_5_mass || p == Proposition::P3_5_gradient;
  ProofCheckOptions po;
  if (p == Proposition::P3_7_third) {
    po.l = 1;
    po.k = 0;
    po.j = 1;
  }
  const EstimateReport r = verify_proposition(p, first ? opt.epsilon : 0.0, grid, opt.quadrature, opt.group, po);
  CheckResult c = make("estimates", r.label + (small_t ? "_small_t" : ""));
  c.record = report_json(r);
  c.passed = r.passed;
  c.diagnosis = r.diagnosis;
  return c;
}

CheckResult check_pointwise(int j, int l, const SuiteOptions& opt) {
  require_abelian(opt, "pointwise bound");
  const std::vector<double> t{1.0, 4.0, 16.0};
  ProofCheckOptions po;
  po.j = j;
  po.l = l;
  const EstimateReport r = verify_proposition(Proposition::P3_8_pointwise, 0.0, t, opt.quadrature, opt.group, po);
  CheckResult c = make("estimates", r.label);
  c.record = report_json(r);
  std::vector<double> fine;
  double change = 0.0;
  for (std::size_t i = 0; i < t.size(); ++i) {
    fine.push_back(pointwise_bound_ratio(j, l, t[i], 41, opt.group));
    change = std::max(change, rel_err(fine.back(), r.norms[i]));
  }
  c.record["values_grid41"] = numbers(fine);
  c.record["grid_change"] = number(change);
  c.passed = r.passed && change < 0.1;
  c.diagnosis = r.diagnosis;
  if (change >= 0.1) c.diagnosis += "grid doubling changes the sup by " + std::to_string(change) + "; ";
  return c;
}

// --- riesz ---

CheckResult check_cz(KernelOrder order, bool smoothness, const SuiteOptions& opt) {
  require_abelian(opt, "CZ checks");
  const GroupDescriptor& g = opt.group;
  std::vector<DyadicKernel> ks;
  if (order == KernelOrder::first)
    for (int n = 0; n <= 4; ++n) ks.push_back(dyadic_kernel(n, order, 1, 0, g, opt.quadrature));
  else
    for (int n = g.Q == 1 ? -6 : -2; n <= -1; ++n) ks.push_back(dyadic_kernel(n, order, 1, 1, g, opt.quadrature));
  const CzCheck r = smoothness ? cz_smoothness_check(ks) : cz_size_check(ks);
  CheckResult c = make("riesz", std::string(smoothness ? "cz_smoothness_" : "cz_size_") +
                                    (order == KernelOrder::first ? "first" : "second"));
  c.record = report_json(r);
  c.passed = r.passed;
  c.diagnosis = r.diagnosis;
  return c;
}

CheckResult check_tail(int j, int l, const SuiteOptions& opt) {
  require_abelian(opt, "tail kernel");
  const GroupDescriptor& g = opt.group;
  const TailKernel k = tail_kernel(j, l, g, 256.0, opt.quadrature);
  const TailStability s = tail_stability(k);
  CheckResult c = make("riesz", "tail_" + to_string(k.case_tag) + "_j" + std::to_string(j) + "_l" + std::to_string(l));
  c.record = report_json(s);
  c.record["params"]["T"] = k.T;
  c.passed = s.passed;
  c.diagnosis = s.base.diagnosis;
  if (s.radius_change >= 0.05 || s.T_change >= 0.05) c.diagnosis += "truncation unstable; ";
  if (k.case_tag == TailCase::III) {
    const TailNorm two = tail_l1_norm(tail_kernel(l, 0, g, 256.0, opt.quadrature), false);
    const double d = rel_err(s.base.value, two.value);
    c.record["case_II_value"] = number(two.value);
    c.record["case_II_rel_diff"] = number(d);
    if (!(d < 1e-6)) {
      c.passed = false;
      c.diagnosis += "case III differs from case II by " + std::to_string(d) + "; ";
    }
  }
  return c;
}

// --- suites ---

std::vector<std::string> suite_names() { return {"geometry", "subordination", "heat", "estimates", "riesz"}; }

std::vector<CheckResult> run_suite(const std::string& suite, const SuiteOptions& opt) {
  opt.quadrature.validate();
  const GroupDescriptor& g = opt.group;
  const bool ab = g.is_abelian();
  const bool shell_ok = ab && g.Q <= 2;
  std::vector<std::function<CheckResult()>> todo;
  auto want = [&](const char* s) { return suite == "all" || suite == s; };
  bool known = suite == "all";
  for (const auto& s : suite_names()) known = known || s == suite;
  if (!known) throw InvalidArgument("unknown suite '" + suite + "'");

  if (want("geometry")) {
    if (ab && g.Q == 1) todo.push_back([&] { return check_distance_formula(opt); });
    todo.push_back([&] { return check_group_laws(opt); });
    if (shell_ok) todo.push_back([&] { return check_radial_density(opt); });
  }
  if (want("subordination")) {
    todo.push_back([&] { return check_psi_mass(opt); });
    todo.push_back([&] { return check_time_integral_identity(opt); });
  }
  if (want("heat")) {
    todo.push_back([&] { return check_heat_symmetry(opt); });
    todo.push_back([&] { return check_derivatives_fd(opt); });
    if (ab) todo.push_back([&] { return check_routes(opt); });
    if (shell_ok) {
      todo.push_back([&] { return check_heat_mass(opt); });
      todo.push_back([&] { return check_semigroup(opt); });
    }
  }
  if (want("estimates")) {
    if (!shell_ok) {
      if (suite != "all") throw UnsupportedRegime("estimates suite: abelian Q <= 2 only");
    } else {
      todo.push_back([&] { return check_decay(Proposition::P3_5_mass, opt); });
      todo.push_back([&] { return check_decay(Proposition::P3_5_gradient, opt); });
      todo.push_back([&] { return check_decay(Proposition::P3_6_mixed, opt); });
      if (g.Q == 1) todo.push_back([&] { return check_decay(Proposition::P3_6_mixed, opt, true); });
      todo.push_back([&] { return check_decay(Proposition::P3_7_third, opt); });
      for (int j = 0; j <= 1; ++j)
        for (int l = 0; l <= 1; ++l) todo.push_back([&, j, l] { return check_pointwise(j, l, opt); });
    }
  }
  if (want("riesz")) {
    if (!shell_ok) {
      if (suite != "all") throw UnsupportedRegime("riesz suite: abelian Q <= 2 only");
    } else {
      for (auto order : {KernelOrder::first, KernelOrder::second})
        for (bool sm : {false, true}) todo.push_back([&, order, sm] { return check_cz(order, sm, opt); });
      for (int j = 0; j <= 1; ++j)
        for (int l = 0; l <= 1; ++l) todo.push_back([&, j, l] { return check_tail(j, l, opt); });
    }
  }
  std::vector<CheckResult> out;
  for (auto& f : todo) out.push_back(f());
  std::sort(out.begin(), out.end(), [](const CheckResult& a, const CheckResult& b) { return a.id < b.id; });
  return out;
}

}  // namespace naheat
