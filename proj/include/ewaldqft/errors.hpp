#pragma once

#include <stdexcept>
#include <string>

namespace ewaldqft {

/// Input violates a documented precondition (capacity, parity, duplicate
/// positions, out-of-range parameters). CLI exit code 2.
class ValidationError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Requested operation is unsupported for this configuration, e.g. a grid
/// size that is not a power of two for the FFT and QFT backends.
class CapabilityError : public ValidationError {
public:
    using ValidationError::ValidationError;
};

/// Direct-summation oracle failed to reach its convergence tolerance.
/// CLI exit code 3.
class ConvergenceError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

} // namespace ewaldqft
