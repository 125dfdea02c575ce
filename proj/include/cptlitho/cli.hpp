#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace cptlitho::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 1;
inline constexpr int kExitNumeric = 2;

/// Runs one command line. `args` excludes the program name. Data goes to
/// `out` unless an --out file is given; diagnostics go to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace cptlitho::cli
