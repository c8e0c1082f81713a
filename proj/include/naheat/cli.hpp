#pragma once

// Command-line surface: `eval` a single quantity, `verify` a named suite.
// Exit codes: 0 ok, 1 failed check, 2 invalid arguments, 3 unsupported regime.

#include "naheat/checks.hpp"

#include <iosfwd>
#include <string>

namespace naheat {

enum ExitCode { kExitOk = 0, kExitFailed = 1, kExitInvalid = 2, kExitUnsupported = 3 };

struct RunConfig {
  GroupDescriptor descriptor = GroupDescriptor::abelian(1);
  std::string suite = "all";
  QuadratureSpec quadrature;
  std::string output_dir;  // empty: no files
  std::uint64_t seed = 7;
};

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace naheat
