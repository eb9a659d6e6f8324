#pragma once

#include <stdexcept>
#include <string>

namespace bimath {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed input record; message carries the line number.
class FormatError : public Error {
 public:
  using Error::Error;
};

class IntegrityError : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

class DomainError : public Error {
 public:
  using Error::Error;
};

class DivisionByZeroError : public DomainError {
 public:
  using DomainError::DomainError;
};

class ValidationError : public Error {
 public:
  using Error::Error;
};

class TransportError : public Error {
 public:
  using Error::Error;
};

// Error reported by a generation provider in its response body.
class ProviderError : public Error {
 public:
  using Error::Error;
};

}  // namespace bimath
