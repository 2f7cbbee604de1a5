#pragma once

#include <stdexcept>
#include <string>

namespace frag {

/// Argument outside the mathematical domain of a function.
struct DomainError : std::domain_error {
    using std::domain_error::domain_error;
};

/// Result not representable in double precision.
struct OverflowError : std::overflow_error {
    using std::overflow_error::overflow_error;
};

/// Iterative or quadrature procedure failed to meet its tolerance.
struct NumericError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Invalid physical or numerical parameters.
struct ParamError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

/// Parameters are valid but belong to neither solvable class.
struct UnsupportedConfig : ParamError {
    using ParamError::ParamError;
};

}  // namespace frag
