#pragma once

#include <stdexcept>
#include <string>

namespace probmorph {

/// Base of every exception thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Invalid arguments: unknown labels, mismatched spaces, malformed measures.
class DomainError : public Error {
 public:
  using Error::Error;
};

/// A numerical precondition failed (non-PSD Gram matrix, singular subspace).
class NumericalError : public Error {
 public:
  using Error::Error;
};

/// An iterative optimizer produced a non-finite objective.
class ConvergenceError : public Error {
 public:
  using Error::Error;
};

}  // namespace probmorph
