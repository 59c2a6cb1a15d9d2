#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace atomgraph::cli {

/// Runs the command line (args excludes the program name) and returns the
/// exit status: 0 ok, 2 configuration error, 3 numeric non-convergence, 4 I/O.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

/// Default --threads: ATOMGRAPH_THREADS if set to a positive integer, else 1.
unsigned default_threads();

}  // namespace atomgraph::cli
