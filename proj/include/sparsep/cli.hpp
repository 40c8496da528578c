#pragma once

#include <iosfwd>

namespace sparsep {

/// Exit codes of the command-line driver.
inline constexpr int kExitOk = 0;
inline constexpr int kExitFailure = 1; ///< runtime failure or verification mismatch
inline constexpr int kExitUsage = 2;   ///< bad flags, unknown scheme, invalid combination

/// Environment variable naming the default config file.
inline constexpr const char *kConfigEnv = "SPARSEP_CONFIG";

/// Entry point of the `sparsep` tool with subcommands run, sweep, verify and
/// stats. Output goes to `out`, diagnostics to `err`.
int cli_main(int argc, const char *const *argv, std::ostream &out, std::ostream &err);

} // namespace sparsep
