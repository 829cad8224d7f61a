#pragma once

#include <string>
#include <vector>

namespace pvi {

inline constexpr const char* kArtifactVersion = "1.0.0";

// Exit codes: 0 success, 1 domain or validation failure, 2 configuration or
// usage error, 3 numerical failure.
int run_cli(int argc, const char* const* argv);
// args excludes the program name.
int run_cli(const std::vector<std::string>& args);

}  // namespace pvi
