#pragma once

#include <iosfwd>

namespace matchlab::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitConfigError = 1;
inline constexpr int kExitRuntimeError = 2;

/// Entry point behind the `matchlab` binary, with injectable streams.
/// Subcommands: solve, simulate, experiment, report.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace matchlab::cli
