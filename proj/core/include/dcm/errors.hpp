#pragma once

#include <stdexcept>
#include <string>

namespace dcm {

// Base of every error raised by the library. The CLI maps the subclasses
// onto process exit codes.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Bad argument or malformed input (unknown catalog name, negative weight, ...).
class InvalidArgument : public Error {
public:
    using Error::Error;
};

// Exact arithmetic overflow or support cap exceeded.
class CapacityError : public Error {
public:
    using Error::Error;
};

// A mathematical precondition does not hold (moment mismatch, p_n = 1, ...).
class PreconditionError : public Error {
public:
    using Error::Error;
};

// The requested route is not available for this input (exact DP on a
// sampler-only recurrence, ...).
class UnsupportedError : public Error {
public:
    using Error::Error;
};

}  // namespace dcm
