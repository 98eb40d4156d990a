#pragma once

#include <iosfwd>

namespace plate::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitNumeric = 1;
inline constexpr int kExitUsage = 2;

/// Entry point behind the plate_lab executable. Results that have no --out or
/// --report target go to `out`; diagnostics go to `err`.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace plate::cli
