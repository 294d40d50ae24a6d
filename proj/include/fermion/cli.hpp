#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace fermion::cli {

enum ExitCode : int { kOk = 0, kUsage = 2, kNumerical = 3, kTruncation = 4 };

/// args excludes the program name. Results go to `out` (or --output), one-line errors to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

int run(int argc, char** argv);

}  // namespace fermion::cli
