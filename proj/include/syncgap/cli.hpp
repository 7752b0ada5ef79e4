#pragma once

namespace syncgap {

// Exit codes of the command-line tool.
enum ExitCode : int {
    exit_ok = 0,
    exit_failure = 1,     // unexpected internal error
    exit_input = 2,       // invalid input or usage
    exit_degenerate = 3,  // zero eigenvalue or spectral gap not simple
    exit_numerical = 4,   // convergence or integration failure
};

// Entry point of `syncgap analyze | rank | msf | simulate`.
int run_cli(int argc, char** argv);

} // namespace syncgap
