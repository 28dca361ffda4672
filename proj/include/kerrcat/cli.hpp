#pragma once

#include <iostream>

namespace kerrcat {

/// Exit codes: 0 success, 2 configuration error, 3 numerical failure, 1 anything else.
int run_cli(int argc, char** argv, std::ostream& out = std::cout, std::ostream& err = std::cerr);

}  // namespace kerrcat
