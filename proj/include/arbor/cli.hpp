#pragma once

// Command-line frontend. Exit codes: 0 success / all verified, 1 verification
// counterexample, 2 usage or input error.

#include <ostream>
#include <string>
#include <vector>

namespace arbor::cli {

/// args excludes the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace arbor::cli
