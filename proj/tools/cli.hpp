#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace varinv::cli {

enum ExitCode { kOk = 0, kUsage = 1, kInput = 2, kInternal = 3 };

/// args excludes the program name.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace varinv::cli
