#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace wilton {

/// Exit codes: 0 success, 1 failed checks, 2 usage or argument error,
/// 3 report could not be written.
int run_command(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace wilton
