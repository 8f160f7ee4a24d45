#pragma once

#include <string>
#include <vector>

namespace fbgtpe::cli {

// Exit codes: 0 success, 1 usage, 2 data error, 3 numerical failure.
int run(const std::vector<std::string>& args);
int run(int argc, const char* const* argv);

}  // namespace fbgtpe::cli
