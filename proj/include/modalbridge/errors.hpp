#pragma once

#include <stdexcept>
#include <string>

namespace modalbridge {

enum class ErrorKind {
    Domain,        // argument outside a function's domain
    Syntax,        // drift expression could not be parsed
    Evaluation,    // drift evaluation left a function's domain
    Conditioning,  // covariance not positive definite after jitter
    Parameter,     // model parameters violate an invariant
    Unsupported,   // parameters outside the supported range of an approximation
    Config,        // malformed configuration document
};

const char* to_string(ErrorKind kind) noexcept;

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
    ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

class DomainError : public Error {
public:
    explicit DomainError(const std::string& what) : Error(ErrorKind::Domain, what) {}
};

class ConditioningError : public Error {
public:
    explicit ConditioningError(const std::string& what) : Error(ErrorKind::Conditioning, what) {}
};

class ParameterError : public Error {
public:
    explicit ParameterError(const std::string& what) : Error(ErrorKind::Parameter, what) {}
};

class UnsupportedError : public Error {
public:
    explicit UnsupportedError(const std::string& what) : Error(ErrorKind::Unsupported, what) {}
};

class ConfigError : public Error {
public:
    explicit ConfigError(const std::string& what) : Error(ErrorKind::Config, what) {}
};

}  // namespace modalbridge
