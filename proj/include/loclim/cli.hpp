#pragma once

#include <ostream>

namespace loclim::cli {

// Exit codes.
inline constexpr int kOk = 0;
inline constexpr int kFailure = 1;
inline constexpr int kConfigError = 2;
inline constexpr int kAccuracyError = 3;

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace loclim::cli
