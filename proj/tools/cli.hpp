#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace rbtr::cli {

enum ExitCode : int {
    kOk = 0,
    kUsage = 2,
    kIo = 3,
    kNumerical = 4,
};

/// Runs one command. `args` excludes the program name. Machine output goes to
/// `out`, progress and diagnostics to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

} // namespace rbtr::cli
