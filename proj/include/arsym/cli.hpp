#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace arsym {

// Entry point behind the arsym binary, separated for in-process testing.
// Returns 0 on success, 1 on usage/config errors, 2 on numeric errors.
int cli_main(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace arsym
