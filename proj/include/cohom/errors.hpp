#pragma once

#include <stdexcept>
#include <string>

namespace cohom {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Bad user input: malformed numbers, out-of-range options, all-zero parameter sets.
class InvalidArgument : public Error {
public:
    using Error::Error;
};

/// A point outside the declared domain of a formula (non-positive metric
/// coefficient, coordinate outside a closed form's chart).
class DomainError : public Error {
public:
    using Error::Error;
};

/// Evaluation of a negative power at zero.
class ZeroArgumentError : public DomainError {
public:
    using DomainError::DomainError;
};

/// The integrator or a fit could not produce a result.
class NumericalFailure : public Error {
public:
    using Error::Error;
};

} // namespace cohom
