#pragma once

#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

namespace nnd {

// Environment lookup; returns nullptr for unset variables.
using EnvLookup = std::function<const char*(const char*)>;

// Runs the command line `args` (args[0] is the program name). Exit codes:
// 0 success, 1 runtime failure, 2 usage error. Failures print one JSON line
// {"error": {"code": ..., "message": ...}} to `err`.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err,
            const EnvLookup& env = nullptr);

}  // namespace nnd
