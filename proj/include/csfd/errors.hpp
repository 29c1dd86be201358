#pragma once

#include <stdexcept>
#include <string>

namespace csfd {

// Error taxonomy. UsageError marks caller bugs (bad arguments, mismatched
// jet shapes, malformed input); the CLI maps it to exit code 1. Everything
// else is a data-dependent failure (exit code 2).
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct UsageError : Error {
    using Error::Error;
};

// Parse failure with a 0-based character offset into the source text.
struct SyntaxError : UsageError {
    std::size_t offset;
    SyntaxError(const std::string& msg, std::size_t off)
        : UsageError(msg + " at offset " + std::to_string(off)), offset(off) {}
};

// Nonpositive coefficient, log/sqrt of a nonpositive value, division by a
// jet with zero constant term, and similar analytic breakdowns.
struct SingularityError : Error {
    using Error::Error;
};

// Problem data failed a validation gate (nonpositive a sample, 6th-order
// constancy condition violated, ...).
struct ValidationError : Error {
    using Error::Error;
};

// The assembled operator is not positive definite where it must be.
struct DefinitenessError : Error {
    using Error::Error;
};

} // namespace csfd
