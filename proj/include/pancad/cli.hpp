#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace pancad {

inline constexpr const char* kVersion = "0.1.0";

/// Command-line entry point. `args` excludes the program name. Returns 0 on
/// success, 1 on usage or input errors, 2 on internal invariant violations.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);
int run(const std::vector<std::string>& args);

}  // namespace pancad
