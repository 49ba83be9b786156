#pragma once

#include <iosfwd>

namespace danneal {

// Command-line driver, separated from main() so tests can invoke subcommands
// in-process. argv follows the usual convention (argv[0] = program name).
// Exit codes: 0 success, 1 configuration or validation error, 2 a majority
// of trials diverged, 3 an assumption check hard-failed.
int cli_main(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace danneal
