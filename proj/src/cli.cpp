#include "naheat/cli.hpp"

#include "naheat/heat_kernel.hpp"
#include "naheat/subordination.hpp"

#include "CLI11.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <optional>
#include <ostream>

namespace naheat {

namespace {

struct Flags {
  std::string group;
  std::optional<int> Q;
  std::optional<double> t, xi;
  std::vector<double> z;
  double u = 0.0;
  double epsilon = 0.25;
  int nodes = 8;
  double rel_tol = 1e-8;
  std::uint64_t seed = 7;
  std::string out;
  double t_min = 4.0, t_max = 64.0;
  // eval extras
  int j = 1, l = 1, n = 0;
  std::string order = "first";
  bool star = false;
  double T = 256.0;
};

void add_common(CLI::App* app, Flags& f) {
  app->add_option("--group", f.group, "abelian:Q or heisenberg");
  app->add_option("--q", f.Q, "shorthand for --group abelian:Q");
  app->add_option("--t", f.t, "heat time");
  app->add_option("--xi", f.xi, "subordination variable");
  app->add_option("--z", f.z, "N coordinates, comma separated")->delimiter(',');
  app->add_option("--u", f.u, "R coordinate");
  app->add_option("--epsilon", f.epsilon, "exponential weight in the decay checks");
  app->add_option("--nodes", f.nodes, "Gauss nodes per panel");
  app->add_option("--rel-tol", f.rel_tol, "relative tolerance of inner quadratures");
  app->add_option("--seed", f.seed, "seed for random point sets");
  app->add_option("--out", f.out, "directory for JSON-lines and CSV reports");
  app->add_option("--t-min", f.t_min, "smallest t of the decay grids");
  app->add_option("--t-max", f.t_max, "largest t of the decay grids");
}

RunConfig config_from(const Flags& f) {
  RunConfig c;
  if (f.Q && !f.group.empty()) throw InvalidArgument("give either --q or --group");
  if (f.Q) c.descriptor = GroupDescriptor::abelian(*f.Q);
  else if (!f.group.empty()) c.descriptor = GroupDescriptor::parse(f.group);
  c.quadrature.nodes_per_dim = f.nodes;
  c.quadrature.rel_tol = f.rel_tol;
  c.quadrature.seed = f.seed;
  c.quadrature.validate();
  c.seed = f.seed;
  c.output_dir = f.out;
  return c;
}

PointG point_from(const Flags& f, const GroupDescriptor& g) {
  if (static_cast<int>(f.z.size()) > g.dim())
    throw InvalidArgument("--z has " + std::to_string(f.z.size()) + " coordinates, N has " + std::to_string(g.dim()));
  PointG x{PointN(g.dim()), f.u};
  for (std::size_t k = 0; k < f.z.size(); ++k) x.z[k] = f.z[k];
  for (int k = 0; k < g.dim(); ++k)
    if (!std::isfinite(x.z[k])) throw InvalidArgument("--z must be finite");
  if (!std::isfinite(x.u)) throw InvalidArgument("--u must be finite");
  return x;
}

double need(const std::optional<double>& v, const char* flag) {
  if (!v) throw InvalidArgument(std::string(flag) + " is required");
  return *v;
}

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::ofstream open_out(const std::string& dir, const std::string& name) {
  std::filesystem::create_directories(dir);
  std::ofstream os(std::filesystem::path(dir) / name);
  if (!os) throw InvalidArgument("cannot write to " + dir);
  return os;
}

int cmd_eval(const std::string& kind, const Flags& f, std::ostream& out) {
  const RunConfig cfg = config_from(f);
  const GroupDescriptor& g = cfg.descriptor;
  const PointG x = point_from(f, g);
  Json rec;
  rec["kind"] = kind;
  rec["group"] = g.name();
  Json params = Json::object();
  double value = 0.0;
  Json err = nullptr;
  if (kind == "distance") {
    value = g_distance(x, g);
    err = 0.0;
  } else if (kind == "heat" || kind == "heat_derivative") {
    const double t = need(f.t, "--t");
    params["t"] = t;
    HeatEval e;
    if (kind == "heat") {
      e = h(t, x, g);
    } else {
      params["j"] = f.j;
      params["star"] = f.star;
      e = f.star ? h_star_derivative(f.j, t, x, g) : h_derivative(f.j, t, x, g);
    }
    value = e.value;
    err = number(e.est_abs_error);
    rec["route"] = e.route;
    Json parts = Json::object();
    for (const auto& p : e.parts) parts[p.name] = {{"multiplicity", p.multiplicity}, {"value", number(p.value)}};
    if (!e.parts.empty()) rec["parts"] = parts;
  } else if (kind == "psi") {
    const double xi = need(f.xi, "--xi");
    params["xi"] = xi;
    PsiEval e;
    if (f.t) {
      params["t"] = *f.t;
      e = psi(*f.t, xi, std::min(f.rel_tol, 1e-8));
    } else {
      e = psi_time_integrated(xi, std::min(f.rel_tol, 1e-8));
    }
    value = e.value;
    err = number(e.est_abs_error);
  } else if (kind == "dyadic") {
    params["n"] = f.n;
    params["order"] = f.order;
    params["j"] = f.j;
    KernelOrder ord;
    if (f.order == "first") ord = KernelOrder::first;
    else if (f.order == "second") ord = KernelOrder::second;
    else throw InvalidArgument("--order must be first or second");
    if (ord == KernelOrder::second) params["l"] = f.l;
    const DyadicKernel k = dyadic_kernel(f.n, ord, f.j, f.l, g, cfg.quadrature);
    value = k.field(x);  // time quadrature has no error estimate
  } else if (kind == "tail") {
    params["j"] = f.j;
    params["l"] = f.l;
    params["T"] = f.T;
    const TailKernel k = tail_kernel(f.j, f.l, g, f.T, cfg.quadrature);
    const TailNorm r = tail_l1_norm(k);
    value = r.value;
    err = number(r.est_abs_error);
    rec["case"] = to_string(k.case_tag);
    rec["quantity"] = "l1_norm";
    rec["remainder_fraction"] = number(r.remainder_fraction);
    rec["trusted"] = r.trusted;
  } else {
    throw InvalidArgument("unknown eval kind '" + kind + "'");
  }
  if (kind != "psi" && kind != "tail")
    rec["point"] = {{"u", x.u}, {"z", std::vector<double>(x.z.c.begin(), x.z.c.begin() + x.z.n)}};
  rec["params"] = params;
  rec["value"] = number(value);
  rec["est_abs_error"] = err;
  out << fmt(value) << '\n';
  out << "est_abs_error " << (err.is_null() ? std::string("n/a") : fmt(err.get<double>())) << '\n';
  out << rec.dump() << '\n';
  if (!cfg.output_dir.empty()) {
    std::ofstream os = open_out(cfg.output_dir, "eval.jsonl");
    write_jsonl(os, rec);
  }
  return kExitOk;
}

int cmd_verify(const std::string& suite, const Flags& f, std::ostream& out) {
  const RunConfig cfg = config_from(f);
  SuiteOptions opt;
  opt.group = cfg.descriptor;
  opt.quadrature = cfg.quadrature;
  opt.seed = cfg.seed;
  opt.t_min = f.t_min;
  opt.t_max = f.t_max;
  opt.epsilon = f.epsilon;
  if (f.t_min < 1.0) throw InvalidArgument("--t-min below 1 leaves the large-time regime of the decay checks");
  dyadic_grid(opt.t_min, opt.t_max);
  const auto results = run_suite(suite, opt);
  std::size_t failed = 0;
  for (const auto& r : results) {
    out << (r.passed ? "PASS " : "FAIL ") << r.id;
    if (r.record.contains("slope") && !r.record["slope"].is_null())
      out << "  slope " << fmt(r.record["slope"].get<double>());
    if (r.record.contains("constant") && !r.record["constant"].is_null())
      out << "  constant " << fmt(r.record["constant"].get<double>());
    if (!r.passed) out << "  (" << r.diagnosis << ")";
    out << '\n';
    failed += !r.passed;
  }
  out << results.size() - failed << " passed, " << failed << " failed\n";
  if (!cfg.output_dir.empty()) {
    std::ofstream os = open_out(cfg.output_dir, "report.jsonl");
    write_jsonl(os, results);
    for (const auto& r : results) {
      const Json& j = r.record;
      if (!j.contains("t") || !j.contains("values") || j["t"].size() != j["values"].size()) continue;
      std::vector<double> t, v, e;
      for (const auto& a : j["t"]) t.push_back(a.get<double>());
      for (const auto& a : j["values"]) v.push_back(a.is_null() ? NAN : a.get<double>());
      if (j.contains("est_abs_errors") && j["est_abs_errors"].size() == t.size())
        for (const auto& a : j["est_abs_errors"]) e.push_back(a.is_null() ? NAN : a.get<double>());
      std::ofstream cs = open_out(cfg.output_dir, r.id + ".csv");
      write_csv(cs, t, v, e);
    }
  }
  return failed ? kExitFailed : kExitOk;
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Heat kernels and Riesz transform kernels on N x| R"};
  app.require_subcommand(1);
  app.set_config("--config", "", "key = value file mirroring the flags ([eval] section for eval-only keys)");
  Flags f;
  // common flags live on the top level so a plain key = value file reaches them
  add_common(&app, f);
  std::string kind, suite;
  CLI::App* ev = app.add_subcommand("eval", "evaluate one quantity");
  ev->add_option("kind", kind, "distance, heat, heat_derivative, psi, dyadic, tail")->required();
  ev->fallthrough();
  ev->add_option("--j", f.j, "frame index");
  ev->add_option("--l", f.l, "second frame index");
  ev->add_option("--n", f.n, "dyadic index");
  ev->add_option("--order", f.order, "dyadic order: first or second");
  ev->add_flag("--star", f.star, "heat_derivative: (X_j h)^*");
  ev->add_option("--T", f.T, "tail time cutoff");
  CLI::App* ve = app.add_subcommand("verify", "run a check suite");
  ve->add_option("suite", suite, "geometry, subordination, heat, estimates, riesz, all")->required();
  ve->fallthrough();
  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n';
    return kExitInvalid;
  }
  try {
    if (*ev) return cmd_eval(kind, f, out);
    return cmd_verify(suite, f, out);
  } catch (const UnsupportedRegime& e) {
    err << "unsupported: " << e.what() << '\n';
    return kExitUnsupported;
  } catch (const InvalidArgument& e) {
    err << "invalid: " << e.what() << '\n';
    return kExitInvalid;
  } catch (const std::invalid_argument& e) {
    err << "invalid: " << e.what() << '\n';
    return kExitInvalid;
  }
}

}  // namespace naheat
