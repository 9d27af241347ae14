// tools/cli.h
#pragma once

namespace tkws::cli {

// Exit codes, also listed in --help. Each failure class gets its own code
// so scripts can branch without parsing messages.
inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 64;        // bad flags or subcommand
inline constexpr int kExitFormat = 65;       // malformed file contents
inline constexpr int kExitMissingInput = 66; // required input not found
inline constexpr int kExitDataset = 69;      // dataset layout problem
inline constexpr int kExitInternal = 70;     // unexpected failure
inline constexpr int kExitConfig = 78;       // bad config key or value

// Parses argv, runs one subcommand, returns the exit code. Failures print
// one "error: [kind] message" line to stderr.
int run(int argc, const char* const* argv);

}  // namespace tkws::cli
