#pragma once

namespace nmt {

// Entry point behind the nmt binary; separated so tests can drive commands
// in-process. Exit codes: 0 success, 1 usage/config error, 2 runtime/data
// error.
int run_cli(int argc, const char* const* argv);

}  // namespace nmt
