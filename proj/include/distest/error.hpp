#pragma once

#include <stdexcept>
#include <string>

namespace distest {

// Base of every error the library raises. Callers that only care about
// "something went wrong" catch this.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Argument outside the mathematical domain of an operation.
class DomainError : public Error {
public:
    using Error::Error;
};

// Caller broke a documented precondition (support mismatch, bad tuple, ...).
class PreconditionError : public Error {
public:
    using Error::Error;
};

// Absolute-continuity violation: q(x) = 0 where p(x) > 0.
class ContinuityError : public PreconditionError {
public:
    using PreconditionError::PreconditionError;
};

// A machine wrote outside its scheduled slot.
class ProtocolViolation : public Error {
public:
    using Error::Error;
};

// Exact enumeration would exceed the path-tuple budget.
class BudgetExceeded : public Error {
public:
    using Error::Error;
};

// Invalid experiment / model configuration (exit code 2 in the CLI).
class ConfigError : public Error {
public:
    using Error::Error;
};

// Truncated-Gaussian interval carries too little mass to sample from.
class RejectionFailure : public Error {
public:
    using Error::Error;
};

// Covariance for the regression reduction is not PSD.
class SpectralBoundError : public Error {
public:
    using Error::Error;
};

// A state a proof says cannot happen did happen.
class ImpossibleState : public Error {
public:
    using Error::Error;
};

class IoError : public Error {
public:
    using Error::Error;
};

}  // namespace distest
