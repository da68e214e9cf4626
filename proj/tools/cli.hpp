#pragma once

#include <ostream>

namespace pfsc::cli {

/// Runs one `pfsc` subcommand. Results go to `out` as `key,value` lines and
/// diagnostics to `err`. Returns 0 on success, 1 on a runtime failure (load,
/// solve, write) and 2 on a usage or flag validation error.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

} // namespace pfsc::cli
