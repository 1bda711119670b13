#pragma once

#include <stdexcept>
#include <string>

namespace nj {

// Base class for all library errors.
struct error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Bad arguments: non-finite input, mismatched dimensions, arity.
struct invalid_input : error {
    using error::error;
};

// Evaluation left the domain of an operation (log of a nonpositive
// value, division by ~0, a point off the Riccati set O, ...).
struct domain_error : error {
    using error::error;
};

// Expression text could not be parsed. `offset` is a byte offset into
// the source string.
struct parse_error : error {
    std::size_t offset;
    parse_error(const std::string& msg, std::size_t off)
        : error(msg + " (at offset " + std::to_string(off) + ")"), offset(off) {}
};

// A trajectory left the finite range the integrator tolerates.
struct divergence_error : error {
    double time;
    divergence_error(const std::string& msg, double t)
        : error(msg + " (at t = " + std::to_string(t) + ")"), time(t) {}
};

} // namespace nj
