#pragma once

#include <iosfwd>

namespace ncv {

/// Exit codes of the command-line front end.
enum ExitCode : int {
  kExitOk = 0,
  kExitInvalid = 1,        // validation or IO error
  kExitNoMinimizer = 2,
  kExitCertificate = 3,
};

/// ncvsolve {solve|check-growth|envelope|oracle} FILE [flags]
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace ncv
