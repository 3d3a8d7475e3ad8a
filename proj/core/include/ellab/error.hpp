#pragma once

#include <stdexcept>
#include <string>

namespace ellab {

// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Precondition or domain violation on caller-supplied input.
class InputError : public Error {
 public:
  using Error::Error;
};

// An iterative method failed to reach its tolerance. Carries the last
// achieved residual / error estimate.
class NumericError : public Error {
 public:
  NumericError(const std::string& what, double achieved)
      : Error(what), achieved_(achieved) {}

  double achieved() const noexcept { return achieved_; }

 private:
  double achieved_;
};

// The requested object does not exist for these data (e.g. a profile limit
// with F(z) < 0).
class InfeasibleError : public Error {
 public:
  using Error::Error;
};

// Monotone iteration left the order interval; the shift constant is too small.
class ConsistencyError : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace ellab
