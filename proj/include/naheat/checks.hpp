#pragma once

// Named verification checks, grouped into suites. The CLI `verify` command and the acceptance
// binary both run these; results are sorted by id so reports are canonical.

#include "naheat/report.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace naheat {

struct SuiteOptions {
  GroupDescriptor group = GroupDescriptor::abelian(1);
  QuadratureSpec quadrature;
  std::uint64_t seed = 7;
  double t_min = 4.0;   // decay grids: powers of two in [t_min, t_max]
  double t_max = 64.0;
  double epsilon = 0.25;
};

std::vector<std::string> suite_names();  // geometry, subordination, heat, estimates, riesz
// "all" runs every suite. Checks that do not apply to the group are left out.
std::vector<CheckResult> run_suite(const std::string& suite, const SuiteOptions& opt);

// geometry
CheckResult check_distance_formula(const SuiteOptions& opt, int samples = 10000);
CheckResult check_group_laws(const SuiteOptions& opt);
CheckResult check_radial_density(const SuiteOptions& opt);
// subordination
CheckResult check_psi_mass(const SuiteOptions& opt);
CheckResult check_time_integral_identity(const SuiteOptions& opt);
// heat
CheckResult check_heat_mass(const SuiteOptions& opt);
CheckResult check_semigroup(const SuiteOptions& opt);
CheckResult check_heat_symmetry(const SuiteOptions& opt);
CheckResult check_routes(const SuiteOptions& opt);
CheckResult check_derivatives_fd(const SuiteOptions& opt);
// estimates
CheckResult check_decay(Proposition p, const SuiteOptions& opt, bool small_t = false);
CheckResult check_pointwise(int j, int l, const SuiteOptions& opt);
// riesz
CheckResult check_cz(KernelOrder order, bool smoothness, const SuiteOptions& opt);
CheckResult check_tail(int j, int l, const SuiteOptions& opt);

std::vector<double> dyadic_grid(double t_min, double t_max);

}  // namespace naheat
