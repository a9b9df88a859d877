#pragma once

#include <stdexcept>
#include <string>

namespace bggm {

/// Bad user input: malformed files, out-of-range arguments, unknown names.
class ValidationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A documented precondition of an operation does not hold (e.g. a non-PD matrix).
class PreconditionError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

/// The sampler hit a non-finite quantity it could not recover from.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace bggm
