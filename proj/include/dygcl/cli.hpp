#pragma once

namespace dygcl {

// Subcommand dispatcher behind the `dygcl` binary. Exit codes: 0 success,
// 1 runtime/numeric failure, 2 usage/config error.
int run_cli(int argc, const char* const* argv);

}  // namespace dygcl
