#pragma once

#include <iosfwd>
#include <span>
#include <string>

namespace sgsacc {

// Process exit codes.
inline constexpr int kExitOk = 0;
inline constexpr int kExitFailure = 1;
inline constexpr int kExitBadInput = 2;
inline constexpr int kExitBackend = 3;

// Entry point behind the `sgsacc` binary; `args` excludes the program name.
// Subcommands: evaluate, validate, rerank, robustness, build-refs.
int run_cli(std::span<const std::string> args, std::ostream& out, std::ostream& err);

}  // namespace sgsacc
