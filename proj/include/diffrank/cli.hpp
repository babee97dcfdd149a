#pragma once

#include <cstddef>
#include <istream>
#include <ostream>

#include "diffrank/config.hpp"

namespace diffrank {

/// Exit statuses of the command-line front end.
enum ExitCode : int { kExitConverged = 0, kExitInputError = 1, kExitUnconverged = 2 };

/// Entry point of the `diffrank` tool: subcommands solve, bench and update.
/// Diagnostics go to `err`; --help text goes to `out`.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

/// Reads "node_id weight" lines. Unlisted nodes get 0. The weights must
/// already form a distribution (entries >= 0, sum 1 within 1e-9); the sum is
/// then divided out to remove rounding. Throws ParseError / ConfigError.
RankVector load_zap(std::istream& in, std::size_t n);

}  // namespace diffrank
