#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace strata::cli {

// Full command dispatch with injected streams (args exclude the program
// name). Exit codes: 0 success, 2 parse/validation failure, 3 when an audit
// fires under --strict.
int run_command(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace strata::cli
