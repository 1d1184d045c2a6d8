#pragma once

#include <ostream>

namespace credeval {

inline constexpr int kExitOk = 0;
inline constexpr int kExitValidation = 1;
inline constexpr int kExitTooManyFailures = 2;

// Entry point shared by the executable and in-process tests.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace credeval
