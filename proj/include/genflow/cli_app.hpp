#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace genflow {

// Entry point of the `genflow` command-line tool; `args` excludes the program
// name. Returns 0 on success (and for --help), 1 when a verification-style
// check ran and failed, 2 on usage, parse or I/O errors.
int cli_main(std::vector<std::string> args, std::ostream& out,
             std::ostream& err);

}  // namespace genflow
