#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace coplan {

/// Raised when a model description violates an MDP invariant.
class ModelError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Raised by the formula parser. `position` is a 0-based character offset.
class ParseError : public std::runtime_error {
public:
  ParseError(const std::string& message, std::size_t position)
      : std::runtime_error(message + " at offset " + std::to_string(position)),
        position_(position) {}

  std::size_t position() const noexcept { return position_; }

private:
  std::size_t position_;
};

/// Raised when product construction hits an inconsistency (e.g. a reachable
/// joint state without any enabled transition).
class ProductError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Raised for malformed model/policy files and mismatched inputs.
class FormatError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

}  // namespace coplan
