#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace syncgap {

// Base of every error raised by the library. The CLI maps the concrete
// type to an exit code (see cli.hpp).
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Malformed or inconsistent user input (files, node sets, parameters).
class InputError : public Error {
public:
    using Error::Error;
};

// Edge-list parse/validation failure; line() is 1-based, 0 when the problem
// is not attached to a single line.
class LoadError : public InputError {
public:
    LoadError(std::size_t line, const std::string& what)
        : InputError("line " + std::to_string(line) + ": " + what), line_(line) {}

    std::size_t line() const noexcept { return line_; }

private:
    std::size_t line_;
};

// Zero eigenvalue or spectral gap not simple; perturbation theory does not apply.
class DegenerateSpectrum : public Error {
public:
    using Error::Error;
};

// Iterative method exhausted its budget, or an oracle could not decide.
class ConvergenceError : public Error {
public:
    using Error::Error;
};

// State blew up or went non-finite during time stepping.
class IntegrationError : public Error {
public:
    IntegrationError(double t, const std::string& what)
        : Error("t = " + std::to_string(t) + ": " + what), time_(t) {}

    double time() const noexcept { return time_; }

private:
    double time_;
};

} // namespace syncgap
