#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace bcl::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitConfig = 2;
inline constexpr int kExitSolver = 3;
inline constexpr int kExitPartial = 4;

/// Entry point of the command-line tool; args excludes the program name.
int run(const std::vector<std::string> &args, std::ostream &out, std::ostream &err);

} // namespace bcl::cli
