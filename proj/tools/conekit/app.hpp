#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace conekit::cli {

// Runs the tool on argv[1..]; returns the process exit code: 0 success,
// 1 numerical failure, 2 invalid input or usage, 3 I/O failure.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace conekit::cli
