#pragma once

#include <stdexcept>
#include <string>

namespace lne {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class DomainError : public Error {
 public:
  using Error::Error;
};

class ReparametrizationError : public Error {
 public:
  using Error::Error;
};

class InputError : public Error {
 public:
  using Error::Error;
};

class InsufficientDataError : public Error {
 public:
  using Error::Error;
};

/// The truncated series agree up to the certified exponent but differ beyond
/// it, so the separation order cannot be decided from the supplied terms.
class UndecidableError : public Error {
 public:
  UndecidableError(const std::string& what, double bound)
      : Error(what), bound_(bound) {}
  double bound() const { return bound_; }

 private:
  double bound_;
};

class IndistinguishableError : public Error {
 public:
  using Error::Error;
};

class DisconnectedError : public Error {
 public:
  DisconnectedError(const std::string& what, double scale)
      : Error(what), scale_(scale) {}
  double scale() const { return scale_; }

 private:
  double scale_;
};

class OnSetError : public Error {
 public:
  using Error::Error;
};

class ResolutionError : public Error {
 public:
  using Error::Error;
};

class TraceError : public Error {
 public:
  using Error::Error;
};

class RegistryError : public Error {
 public:
  using Error::Error;
};

class ParseError : public Error {
 public:
  using Error::Error;
};

class ValidationError : public Error {
 public:
  using Error::Error;
};

}  // namespace lne
