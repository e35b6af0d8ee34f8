#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace insider::cli {

enum ExitCode { Ok = 0, ValidationError = 1, NumericalFailure = 2 };

// args excludes the program name. Reports go to `out`, diagnostics to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);
int run(int argc, const char* const* argv);

// Environment variable naming the default output directory.
inline constexpr const char* kOutDirEnv = "INSIDER_OUT_DIR";

} // namespace insider::cli
