#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace cantor::cli {

inline constexpr int kSchemaVersion = 1;

/// Runs one command. args excludes the program name. Returns the exit code:
/// 0 success, 1 domain error, 2 usage error.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

} // namespace cantor::cli
