#ifndef MCG_CLI_HPP
#define MCG_CLI_HPP

#include <iosfwd>
#include <string>
#include <vector>

namespace mcg::cli {

// Runs one CLI invocation. Exit codes: 0 success, 2 usage or argument
// error, 3 numeric regime error (the message names the failing bound).
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

} // namespace mcg::cli

#endif
