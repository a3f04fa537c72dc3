#pragma once

#include <iosfwd>
#include <stdexcept>
#include <string>
#include <vector>

namespace recert {

class UsageError : public std::runtime_error {
 public:
  explicit UsageError(const std::string& message) : std::runtime_error(message) {}
};

/// Runs the command-line tool. `args` excludes the program name. Returns the
/// exit code: 0 for success or a true verdict, 1 for a false verdict, 2 for
/// usage or input errors.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace recert
