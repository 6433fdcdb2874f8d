#pragma once

#include <string>
#include <vector>

namespace cfml {

// Entry point behind tools/cfml_main.cpp; also callable in-process by tests.
// Returns 0 on success, 1 on validation/usage errors, 2 on runtime failure.
int run_cli(const std::vector<std::string>& args);
int run_cli(int argc, const char* const* argv);

} // namespace cfml
