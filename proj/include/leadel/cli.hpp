#pragma once

#include <iosfwd>

namespace leadel {

// Full command-line entry point; returns the process exit code.
// 0 = ok, 1 = usage error, 2 = numerical failure, 3 = crossval failure.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace leadel
