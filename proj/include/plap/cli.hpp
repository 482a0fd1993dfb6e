#pragma once

#include <iosfwd>

namespace plap::cli {

enum ExitCode : int {
    kOk = 0,
    kFailure = 1,
    kSchema = 2,
    kExpression = 3,
    kNotConverged = 4,
    kDomain = 5,
};

/// Entry point of the `plap` tool. Summary lines go to `out`, warnings and
/// errors to `err`; reports and profiles are written under --out.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace plap::cli
