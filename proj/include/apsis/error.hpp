#pragma once

#include <stdexcept>
#include <string>

namespace apsis {

/// Argument outside the domain where an operation is defined.
class DomainError : public std::domain_error {
 public:
  explicit DomainError(const std::string& what) : std::domain_error(what) {}
};

/// A rigorous check produced a sign violation.
class VerificationFailure : public std::runtime_error {
 public:
  explicit VerificationFailure(const std::string& what)
      : std::runtime_error(what) {}
};

/// (E, l) does not admit a bounded, non-circular orbit.
class NoBoundedOrbit : public DomainError {
 public:
  explicit NoBoundedOrbit(const std::string& what) : DomainError(what) {}
};

/// Zero angular momentum: the orbit falls into the centre.
class DegenerateOrbit : public DomainError {
 public:
  explicit DegenerateOrbit(const std::string& what) : DomainError(what) {}
};

}  // namespace apsis
