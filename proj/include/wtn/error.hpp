#pragma once

#include <stdexcept>
#include <string>

namespace wtn {

// Base for every error the library raises.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Bad or unreadable input data (trade records, registry, config files).
class InputError : public Error {
public:
    using Error::Error;
};

// Iterative method did not reach its tolerance.
class ConvergenceError : public Error {
public:
    ConvergenceError(const std::string& what, double residual)
        : Error(what), residual_(residual) {}

    double residual() const noexcept { return residual_; }

private:
    double residual_;
};

} // namespace wtn
