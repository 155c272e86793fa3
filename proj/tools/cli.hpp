#pragma once

#include <iosfwd>

namespace nonneg::cli {

/// Command-line entry point. Returns 0 on success, 1 when a run fails
/// numerically (or cannot write its output), 2 on bad arguments.
int cli_main(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace nonneg::cli
