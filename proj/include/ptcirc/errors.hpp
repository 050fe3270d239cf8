#pragma once

#include <stdexcept>
#include <string>

namespace ptcirc {

// malformed input file (trace CSV, circuit file)
struct FormatError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// iteration failed to converge, residual above tolerance, etc.
struct NumericalError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// trajectory blew past the representable range; carries how far we got
struct OverflowError : NumericalError {
    double time_reached;
    OverflowError(const std::string& msg, double t)
        : NumericalError(msg), time_reached(t) {}
};

}  // namespace ptcirc
