#pragma once

#include <stdexcept>
#include <string>

namespace sysfree {

// Root of every error the toolkit raises. The CLI maps the subclasses onto
// exit codes (see cli_io.hpp).
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Invalid configuration or argument values.
class ParameterError : public Error {
 public:
  using Error::Error;
};

// A point or value lies outside the domain an operation is defined on.
class DomainError : public Error {
 public:
  using Error::Error;
};

class NonHyperbolicError : public DomainError {
 public:
  using DomainError::DomainError;
};

class CoordinateSingularityError : public DomainError {
 public:
  using DomainError::DomainError;
};

class DegenerateInputError : public ParameterError {
 public:
  using ParameterError::ParameterError;
};

class DegenerateMapError : public Error {
 public:
  using Error::Error;
};

class NoCertificateError : public Error {
 public:
  using Error::Error;
};

class IntegrationError : public Error {
 public:
  using Error::Error;
};

class ArithmeticOverflowError : public Error {
 public:
  using Error::Error;
};

class CacheInvalidError : public Error {
 public:
  using Error::Error;
};

class UsageError : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace sysfree
