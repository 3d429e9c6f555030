#pragma once

#include <stdexcept>
#include <string>

namespace cjs {

// Base for all library errors. Each subclass maps to one failure category.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class InvalidArgument : public Error {
 public:
  using Error::Error;
};

// Configuration violates a physical constraint (e.g. the band-limit relation).
class InvalidConfiguration : public Error {
 public:
  using Error::Error;
};

// A precondition on the data does not hold (e.g. non-zero border pixels).
class PreconditionError : public Error {
 public:
  using Error::Error;
};

// Gradient field is not integrable to tolerance.
class InconsistentField : public Error {
 public:
  using Error::Error;
};

class DivisionByZero : public Error {
 public:
  using Error::Error;
};

// Explicit evaluation would exceed the documented size budget.
class TooLarge : public Error {
 public:
  using Error::Error;
};

}  // namespace cjs
