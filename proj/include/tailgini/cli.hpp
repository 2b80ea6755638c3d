#pragma once

#include <string>
#include <vector>

namespace tailgini {

// Exit codes: 0 success, 2 command line errors, 3 violated input contracts,
// 4 file problems, 5 numeric/estimation failures.
inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 2;
inline constexpr int kExitContract = 3;
inline constexpr int kExitIo = 4;
inline constexpr int kExitEstimation = 5;

int run_cli(int argc, const char* const* argv);
int run_cli(const std::vector<std::string>& args); // args without the program name

} // namespace tailgini
