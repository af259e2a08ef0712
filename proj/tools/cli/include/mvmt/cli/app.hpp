// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <iosfwd>

namespace mvmt::cli {

/// Exit codes: 0 success, 1 usage or config error, 2 data error, 3 numerical failure.
enum ExitCode : int { kOk = 0, kUsage = 1, kData = 2, kNumerical = 3 };

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace mvmt::cli
