#pragma once

#include <string>
#include <vector>

namespace studylink {

// Runs one CLI invocation. Exit codes: 0 success, 2 bad input or usage,
// 3 numerical failure, 4 no degenerate factorization, 5 verification failed.
int cli_run(const std::vector<std::string>& args);

}  // namespace studylink
