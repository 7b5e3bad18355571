#pragma once

#include <stdexcept>
#include <string>

namespace packflow {

/// Base class for everything thrown by this library.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Bad user input: malformed files, violated invariants, inconsistent
/// configuration. CLI maps these to exit code 2.
struct ValidationError : Error {
    using Error::Error;
};

/// Structural problem in a config document. Carries the offending field path.
struct SchemaError : ValidationError {
    SchemaError(const std::string& field_path, const std::string& what)
        : ValidationError("schema error at '" + field_path + "': " + what), field(field_path) {}
    std::string field;
};

struct NonMonotoneTime : ValidationError {
    using ValidationError::ValidationError;
};

struct EmptyProfile : ValidationError {
    using ValidationError::ValidationError;
};

struct LengthMismatch : ValidationError {
    using ValidationError::ValidationError;
};

/// Numerical failures. CLI maps these to exit code 3.
struct NumericalError : Error {
    using Error::Error;
};

struct NonpositiveRCResistance : NumericalError {
    using NumericalError::NumericalError;
};

struct ZeroUpstreamResistance : NumericalError {
    using NumericalError::NumericalError;
};

struct UnsolvablePack : NumericalError {
    using NumericalError::NumericalError;
};

struct SingularSystem : NumericalError {
    using NumericalError::NumericalError;
};

struct KirchhoffResidualExceeded : NumericalError {
    using NumericalError::NumericalError;
};

struct SocOutOfBounds : NumericalError {
    using NumericalError::NumericalError;
};

struct ProfileGap : ValidationError {
    using ValidationError::ValidationError;
};

} // namespace packflow
