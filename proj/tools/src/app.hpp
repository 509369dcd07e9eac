#pragma once

namespace ccge::cli {

/// Parses the command line and runs one subcommand. Returns the process exit code:
/// 0 success, 2 invalid input or arguments, 3 non-convergence, 4 file system error.
int run(int argc, char** argv);

}  // namespace ccge::cli
