#pragma once

#include <stdexcept>
#include <string>

namespace diagkit {

/// Base of every error thrown by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Operand dimensions do not fit the operation.
class ShapeError : public Error {
public:
    using Error::Error;
};

/// A scalar argument lies outside the domain where the operation is defined.
class DomainError : public Error {
public:
    using Error::Error;
};

/// An operand violates a structural precondition (not idempotent, not dual, ...).
class PreconditionError : public Error {
public:
    using Error::Error;
};

/// The requested diagonal cannot be realized by any operator of the asked class.
class InfeasibleError : public Error {
public:
    using Error::Error;
};

/// A model description is missing information needed to decide a question.
class SpecificationError : public Error {
public:
    using Error::Error;
};

}  // namespace diagkit
