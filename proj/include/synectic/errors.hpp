#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace synectic {

// Dimension or variance mismatch in a tensor operation.
struct ShapeError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

// Evaluation left the domain of a scalar function: log of a non-positive
// value, division by zero, sqrt of a negative number, fractional power of
// a non-positive base.  When raised through the expression evaluator the
// message names the offending subexpression and the coordinate values.
struct DomainError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Raised by the expression and model-document parsers.  `offset` is the
// byte position in the parsed text at which the problem was detected.
struct ParseError : std::runtime_error {
    std::size_t offset;
    ParseError(const std::string& msg, std::size_t at)
        : std::runtime_error(msg), offset(at) {}
};

// |det g| fell below the singularity threshold at an evaluation point.
struct SingularMetricError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Lookup of a named field, 1-form or (1,1) tensor the model does not define.
struct UnknownFieldError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

}  // namespace synectic
