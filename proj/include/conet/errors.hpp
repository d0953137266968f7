#pragma once

#include <stdexcept>
#include <string>

namespace conet {

// Base class for everything this library throws on purpose.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Malformed expression or config text.
struct ParseError : Error {
    using Error::Error;
};

// Syntactically valid but outside the admissible function class
// (e.g. exp(u1*u2), whose argument is not linear in a single variable).
struct ClassViolationError : ParseError {
    using ParseError::ParseError;
};

// Denominator vanishes at the evaluation point, or division by the
// zero expression.
struct PoleError : Error {
    using Error::Error;
};

// Degenerate configuration: det W identically zero, or a transform pivot
// that is the zero expression.
struct SingularError : Error {
    using Error::Error;
};

// Bad indices, mismatched dimensions, missing seeds, and similar misuse.
struct DomainError : Error {
    using Error::Error;
};

} // namespace conet
