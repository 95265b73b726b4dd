#pragma once

#include <stdexcept>
#include <string>

namespace pkstiff {

/// Base class for all library errors.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Invalid arguments, dimension mismatches, malformed requests.
struct InputError : Error {
    using Error::Error;
};

/// Bad external data: broken files, asymmetric or indefinite matrices.
struct DataError : Error {
    using Error::Error;
};

/// Numerical failure: singular or indefinite system where a definite one is required.
struct NumericalError : Error {
    using Error::Error;
};

/// Rank-deficient passive Jacobian in a solver that requires full rank.
struct SingularityError : NumericalError {
    using NumericalError::NumericalError;
};

/// Point outside the reachable workspace.
struct WorkspaceError : Error {
    using Error::Error;
};

/// Input outside the validity regime of an approximation (e.g. small-angle).
struct RegimeError : Error {
    using Error::Error;
};

}  // namespace pkstiff
