#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace amb::cli {

/// Runs one `amb` invocation. `args[0]` is the program name.
/// Returns 0 on success, 1 on a domain error (one JSON line on `err`),
/// 2 on a usage error.
int execute(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);
int execute(const std::vector<std::string>& args);

}  // namespace amb::cli
