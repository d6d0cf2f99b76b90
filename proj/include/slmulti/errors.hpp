#pragma once

#include <stdexcept>
#include <string>

namespace slmulti {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed or inconsistent input data (maps to CLI exit code 3).
class ValidationError : public Error {
 public:
  using Error::Error;
};

/// A numerical procedure could not deliver its contract (CLI exit code 4).
class NumericalError : public Error {
 public:
  using Error::Error;
};

class PropagationError : public NumericalError {
 public:
  PropagationError(const std::string& what, double location)
      : NumericalError(what), location_(location) {}
  double location() const noexcept { return location_; }

 private:
  double location_;
};

/// Raised when a resolvent is requested at a point of the spectrum.
class SpectrumError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

class NotAnEigenvalueError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

class ZeroOnContourError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

}  // namespace slmulti
