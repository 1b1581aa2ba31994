// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace speclab::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 2;
inline constexpr int kExitNonConvergence = 3;

/// Runs one subcommand. The table goes to --output when given, else to
/// `out`; the one-line summary goes to `out` in the first case and to `err`
/// in the second. Returns the process exit status.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

/// Decimal form with 17 significant digits.
std::string format_real(double v);

}  // namespace speclab::cli
