#pragma once

#include <string>
#include <vector>

namespace fdif {

/// Entry point shared by the binary and the tests.
/// Exit codes: 0 success, 1 usage error, 2 data error.
int run_cli(const std::vector<std::string>& args);

}  // namespace fdif
