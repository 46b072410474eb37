#pragma once

#include <stdexcept>

namespace mql {

// Base class for everything thrown by this library.
class error : public std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Vector/matrix size disagreement.
class dimension_error : public error {
  using error::error;
};

// Value outside the object's domain (unknown label, point off the support).
class domain_error : public error {
  using error::error;
};

// An operation's stated precondition does not hold.
class precondition_error : public error {
  using error::error;
};

// Structurally well-formed input violating a model invariant.
class validation_error : public error {
  using error::error;
};

// Malformed input text.
class parse_error : public error {
  using error::error;
};

// Input exceeds a documented size limit.
class capacity_error : public error {
  using error::error;
};

}  // namespace mql
