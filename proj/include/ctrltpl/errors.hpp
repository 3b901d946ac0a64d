#pragma once

#include <stdexcept>
#include <string>

namespace ctrltpl {

// Base class for all library errors.
class Error : public std::runtime_error {
  public:
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

// Incompatible shapes or variable counts.
class DimensionError : public Error {
  public:
    using Error::Error;
};

// Scalar argument out of range (negative duration, bad time ordering, ...).
class ArgumentError : public Error {
  public:
    using Error::Error;
};

// Semantic validation of structured data (configs, anchors, matrices).
class ValidationError : public Error {
  public:
    using Error::Error;
};

// Operation refused because the problem exceeds a hard size budget.
class SizeLimitError : public Error {
  public:
    using Error::Error;
};

// The pair (C(0), A(0)) is not observable ("not observable at target").
class ObservabilityError : public Error {
  public:
    using Error::Error;
};

// Observer gain matrix S became numerically singular.
class GainSingularityError : public Error {
  public:
    using Error::Error;
};

// Simulated state left the representable range.
class DivergenceError : public Error {
  public:
    using Error::Error;
};

} // namespace ctrltpl
