#pragma once

#include <stdexcept>
#include <string>

namespace sae {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A special function was evaluated at (or numerically on top of) a pole.
class PoleError : public Error {
public:
    using Error::Error;
};

/// An argument lies outside the domain an operation supports.
class DomainError : public Error {
public:
    using Error::Error;
};

/// Catastrophic cancellation: a connection formula was requested too close to
/// an integer parameter, or a series left its accuracy budget.
class CancellationError : public Error {
public:
    using Error::Error;
};

/// The singularity regime of a problem does not admit the requested operation.
class RegimeError : public Error {
public:
    using Error::Error;
};

/// A root bracket could not be established or refined.
class BracketError : public Error {
public:
    using Error::Error;
};

} // namespace sae
