#pragma once

#include <stdexcept>
#include <string>

namespace sphgrav {

/// Argument outside the mathematical domain of an operation (vacuum state,
/// radius below the wall, |xi| >= 1, ...).
class DomainError : public std::domain_error {
public:
  using std::domain_error::domain_error;
};

/// A caller-side precondition that is not a pure domain restriction, e.g. a
/// wave leaving an averaging box.
class PreconditionError : public std::logic_error {
public:
  using std::logic_error::logic_error;
};

/// Invalid run configuration.
class ConfigError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// The CFL condition max|lambda| < l/h failed, or neighbouring fans interact.
class CflError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// A runtime-monitored bound or solver invariant was violated.
class InvariantViolation : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

} // namespace sphgrav
