#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace cogstream::cli {

// Runs one subcommand. `args` excludes the program name. Returns 0 on
// success, 2 on usage errors and 1 on domain errors (error name on `err`).
// `serve` blocks until SIGINT or SIGTERM.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err,
        std::istream& in);

}  // namespace cogstream::cli
