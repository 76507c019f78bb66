#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace dcm::cli {

enum ExitCode : int {
    kOk = 0,
    kFailure = 1,
    kUsage = 2,
    kCapacity = 3,
    kPrecondition = 4,
};

// args excludes the program name. Output goes to `out` unless --output is
// given; diagnostics go to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace dcm::cli
