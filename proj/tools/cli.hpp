#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace imlg::cli {

/// Runs one `imlg` invocation. args[0] is the program name. Returns the
/// process exit code; diagnostics go to `err`, progress and configs to `out`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace imlg::cli
