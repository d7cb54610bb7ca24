#pragma once

#include <stdexcept>
#include <string>

namespace rigidqmc {

// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A caller-supplied size, range or option is outside its legal domain.
class ParameterError : public Error {
 public:
  using Error::Error;
};

// A value cannot represent an element of the requested space (e.g. a
// zero-norm quaternion).
class InvalidElementError : public Error {
 public:
  using Error::Error;
};

// Point sets handed to a combinator do not fit together.
class CompositionError : public Error {
 public:
  using Error::Error;
};

// An exact oracle would exceed its work budget. `hint` names the estimator
// that can be used instead.
class BudgetRefusal : public Error {
 public:
  BudgetRefusal(const std::string& what, std::string hint)
      : Error(what), hint_(std::move(hint)) {}
  const std::string& hint() const noexcept { return hint_; }

 private:
  std::string hint_;
};

// A pseudorandom backend could not certify its output.
class BackendFailure : public Error {
 public:
  using Error::Error;
};

}  // namespace rigidqmc
