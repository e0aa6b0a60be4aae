#pragma once

namespace gubm {

// Runs the command-line toolkit. Exit codes: 0 success, 1 usage error,
// 2 malformed or inconsistent data, 3 numerical failure.
int run_cli(int argc, const char* const* argv);

}  // namespace gubm
