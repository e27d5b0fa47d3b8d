#pragma once

#include <stdexcept>
#include <string>

namespace sqz {

/// Thrown when an argument lies outside an operation's domain.
class DomainError : public std::domain_error {
public:
  explicit DomainError(const std::string& what) : std::domain_error(what) {}
};

/// Thrown at a pole of a disentangling coefficient (1 -/+ 2ik == 0).
class SingularityError : public std::domain_error {
public:
  explicit SingularityError(const std::string& what) : std::domain_error(what) {}
};

/// Thrown when a propagated grid state reaches the grid boundary.
class WraparoundError : public std::runtime_error {
public:
  explicit WraparoundError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace sqz
