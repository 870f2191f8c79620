#pragma once

#include <stdexcept>
#include <string>

namespace qcd {

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Operand dimensions do not match the operation's requirements.
struct DimError : Error {
    using Error::Error;
};

// Parameter outside its mathematical domain (alpha range, probability, p-norm order).
struct DomainError : Error {
    using Error::Error;
};

// Input fails an operator-class requirement (Hermiticity, positivity, trace).
struct InvalidOperator : Error {
    using Error::Error;
};

// Requested construction or rule is not available for this channel kind.
struct Unsupported : Error {
    using Error::Error;
};

// Sampled data contradicts an assumed structural property (e.g. monotonicity).
struct Inconsistent : Error {
    using Error::Error;
};

}  // namespace qcd
