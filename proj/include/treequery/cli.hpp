#pragma once

#include <iostream>

namespace treequery {

/// Entry point behind the `treequery` binary. Streams are injectable so
/// tests can run subcommands in-process.
int run_cli(int argc, const char* const* argv, std::ostream& out = std::cout,
            std::ostream& err = std::cerr);

} // namespace treequery
