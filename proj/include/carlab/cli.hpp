#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace carlab {

/// Exit codes: 0 computed, 1 usage or parse error, 2 mathematical error,
/// 3 no convergence.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace carlab
