// Copyright Contributors to the satrecon project
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace satrecon::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitDomainError = 1;
inline constexpr int kExitUsage = 2;

/// Runs one subcommand. `args` excludes the program name. Diagnostics go to
/// `err`, data that has no output file goes to `out`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

/// argv-style entry point used by the executable.
int run(int argc, const char* const* argv);

}  // namespace satrecon::cli
