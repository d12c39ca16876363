#pragma once

#include <stdexcept>
#include <string>

namespace mmot {

// Violated mathematical precondition (dimension mismatch, k = 0, zero mass...).
class DomainError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Malformed external input. `where` is a JSON-path-like locator such as
// "$.weights[3]".
class InputError : public std::runtime_error {
 public:
  InputError(std::string where, const std::string& what)
      : std::runtime_error(where + ": " + what), where_(std::move(where)) {}

  const std::string& where() const noexcept { return where_; }

 private:
  std::string where_;
};

// Instance exceeds the size an exhaustive routine accepts.
class TooLargeError : public std::length_error {
 public:
  using std::length_error::length_error;
};

// A solver reached an iteration cap or lost its certificate.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace mmot
