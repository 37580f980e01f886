#pragma once

#include <iosfwd>

namespace binvis::cli {

/// Parses argv and dispatches to a subcommand. Returns the process exit code.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace binvis::cli
