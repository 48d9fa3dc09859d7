#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace haarpush {

/// The whole command-line tool, parameterized over streams so tests can run
/// it in-process. `args` excludes the program name. Returns the process exit
/// code: 0 = success / all checks passed, 1 = usage or configuration error,
/// 2 = a verification check failed.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace haarpush
