#pragma once

#include <string>
#include <vector>

namespace oqs::cli {

// Exit codes: 0 success, 1 module-level assertion failure, 2 input error.
int run(int argc, char** argv);

// Same entry point on a pre-split argument list (for tests).
int run(const std::vector<std::string>& args);

}  // namespace oqs::cli
