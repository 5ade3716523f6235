#pragma once

#include <stdexcept>
#include <string>

namespace semieff {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Inputs that do not fit together: mismatched schemes, unknown names, bad config.
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// Singular or ill-conditioned linear algebra.
class NumericalError : public Error {
 public:
  using Error::Error;
};

/// Parameter or density values outside the model's domain.
class DomainError : public Error {
 public:
  using Error::Error;
};

/// A model violates one of its declared structural properties.
class ModelError : public Error {
 public:
  using Error::Error;
};

/// A caller-side contract was violated (e.g. an uncentered tangent).
class PreconditionError : public Error {
 public:
  using Error::Error;
};

}  // namespace semieff
