#pragma once

#include <stdexcept>
#include <string>

namespace cfcsr {

// Base of every error thrown by the library. The CLI maps the three
// subclasses onto distinct exit codes.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Malformed user input: unreadable files, bad records, violated preconditions.
class InputError : public Error {
public:
    using Error::Error;
};

// A numerical procedure failed to reach its tolerance.
class NumericError : public Error {
public:
    NumericError(const std::string& what, double achieved_error = -1.0)
        : Error(what), achieved_error_(achieved_error) {}
    double achieved_error() const noexcept { return achieved_error_; }

private:
    double achieved_error_;
};

// A simulation could not produce a pattern under the requested parameters.
class InfeasibleError : public Error {
public:
    using Error::Error;
};

}  // namespace cfcsr
