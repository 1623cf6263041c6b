#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace linkc::cli {

/// Runs the command line `args` (args[0] is the program name). Returns the
/// process exit code: 0 success, 1 verification or runtime failure, 2 bad flags.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace linkc::cli
