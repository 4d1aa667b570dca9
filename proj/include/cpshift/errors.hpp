#pragma once

#include <stdexcept>
#include <string>

namespace cpshift {

// Base of everything thrown by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Invalid physical input (config / validation level).
class ValidationError : public Error {
public:
    using Error::Error;
};

class DetuningTooSmall : public ValidationError {
public:
    using ValidationError::ValidationError;
};

class NonPositiveLength : public ValidationError {
public:
    using ValidationError::ValidationError;
};

class NonUnitDipole : public ValidationError {
public:
    using ValidationError::ValidationError;
};

class CouplingOutOfRange : public ValidationError {
public:
    using ValidationError::ValidationError;
};

// Malformed configuration or command line.
class ConfigError : public Error {
public:
    using Error::Error;
};

// Numerical failures.
class NumericalError : public Error {
public:
    using Error::Error;
};

class ZeroSeparation : public NumericalError {
public:
    using NumericalError::NumericalError;
};

class PoleHit : public NumericalError {
public:
    using NumericalError::NumericalError;
};

class DomainError : public NumericalError {
public:
    using NumericalError::NumericalError;
};

class QuadratureFailure : public NumericalError {
public:
    using NumericalError::NumericalError;
};

class SiteBudgetExceeded : public NumericalError {
public:
    using NumericalError::NumericalError;
};

class ParityViolation : public NumericalError {
public:
    using NumericalError::NumericalError;
};

// Fitting.
class FitError : public NumericalError {
public:
    using NumericalError::NumericalError;
};

class InsufficientPoints : public FitError {
public:
    using FitError::FitError;
};

class ZeroValue : public FitError {
public:
    using FitError::FitError;
};

class TooFewPeaks : public FitError {
public:
    using FitError::FitError;
};

} // namespace cpshift
