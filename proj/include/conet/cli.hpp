#pragma once

// In-process CLI entry point. `args` excludes the program name. Exit codes:
// 0 all checks pass, 1 check failure, 2 bad input (grammar, config, flags),
// 3 singular configuration or pivot.

#include <string>
#include <vector>

namespace conet {

int cli_main(std::vector<std::string> args);

} // namespace conet
