#pragma once

#include <stdexcept>
#include <string>

namespace rsg {

/// Base of all domain-level failures; the CLI maps these to exit code 1.
struct Error : std::runtime_error {
  explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

struct DomainMismatch : Error {
  using Error::Error;
};
struct TooLarge : Error {
  using Error::Error;
};
struct NotFixedPoint : Error {
  using Error::Error;
};
struct IncompleteStrategy : Error {
  using Error::Error;
};
struct HorizonNotFound : Error {
  using Error::Error;
};
struct NoValuePreservingEdge : Error {
  using Error::Error;
};
struct InvalidAutomaton : Error {
  using Error::Error;
};

/// Internal consistency failures; never expected on valid inputs.
struct SingularSystem : Error {
  using Error::Error;
};
struct InvariantBroken : Error {
  using Error::Error;
};

}  // namespace rsg
