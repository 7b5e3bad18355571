#pragma once

#include <string>
#include <vector>

namespace packflow {

/// Entry point behind the packflow binary; args exclude the program name.
/// Returns 0 on success, 2 on input/validation problems, 3 on numerical
/// failure.
int run_cli(std::vector<std::string> args);

} // namespace packflow
