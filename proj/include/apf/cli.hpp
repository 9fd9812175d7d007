#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace apf::cli {

enum ExitCode : int {
    kSuccess = 0,
    kUsage = 1,
    kDataError = 2,
    kInternalError = 3,
};

/// Entry point behind the `apf` binary: gen, solve, bench, fit, convert.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace apf::cli
