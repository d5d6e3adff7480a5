#pragma once

#include <stdexcept>
#include <string>

namespace orra {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Invalid configuration or parameter values. Maps to CLI exit code 2.
class ConfigError : public Error {
public:
    using Error::Error;
};

/// A scalar parameter outside its admissible domain (xi <= 0, tau <= 0, ...).
class ParameterError : public ConfigError {
public:
    using ConfigError::ConfigError;
};

class TopologyError : public ConfigError {
public:
    using ConfigError::ConfigError;
};

class EmptyInputError : public ConfigError {
public:
    using ConfigError::ConfigError;
};

class DimensionError : public Error {
public:
    using Error::Error;
};

/// Numerical failure during a run. Maps to CLI exit code 3.
class NumericalError : public Error {
public:
    using Error::Error;
};

/// State of charge left its admissible band; indicates a projection bug upstream.
class SocViolation : public NumericalError {
public:
    using NumericalError::NumericalError;
};

class IllConditionedError : public NumericalError {
public:
    IllConditionedError(const std::string& what, double condition)
        : NumericalError(what), condition_(condition) {}
    double condition() const { return condition_; }

private:
    double condition_;
};

class InstabilityError : public NumericalError {
public:
    InstabilityError(const std::string& variable)
        : NumericalError("non-finite value in grid state variable '" + variable + "'"),
          variable_(variable) {}
    const std::string& variable() const { return variable_; }

private:
    std::string variable_;
};

/// The equality target lies outside what the fleet can deliver.
class InfeasibleError : public NumericalError {
public:
    InfeasibleError(const std::string& what, double lo, double hi)
        : NumericalError(what), lo_(lo), hi_(hi) {}
    double achievable_lo() const { return lo_; }
    double achievable_hi() const { return hi_; }

private:
    double lo_;
    double hi_;
};

/// Two surrogate samples closer than the infill rule allows (or identical).
class InfillViolationError : public NumericalError {
public:
    using NumericalError::NumericalError;
};

class IncompleteTraceError : public Error {
public:
    using Error::Error;
};

class PreconditionError : public Error {
public:
    using Error::Error;
};

}  // namespace orra
