#pragma once

#include <string>
#include <vector>

namespace phonoparse::cli {

/// Runs the phonoparse command line. Exit status: 0 success, 1 data or
/// validation error, 2 usage error.
int run(int argc, const char* const* argv);
int run(const std::vector<std::string>& args);  // args exclude the program name

}  // namespace phonoparse::cli
