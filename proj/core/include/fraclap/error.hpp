#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace fraclap {

/// Broad failure categories; the CLI maps each one to its own exit code.
enum class ErrorCategory {
  invalid_argument,  // bad parameter values (s out of range, a >= b, ...)
  mismatch,          // dimension / problem / right-hand side incompatibility
  numerical,         // non-finite entries, failed factorization, budget exhausted
  io,                // unreadable or malformed files
  config,            // malformed experiment configuration
};

std::string_view to_string(ErrorCategory category) noexcept;

class Error : public std::runtime_error {
 public:
  Error(ErrorCategory category, const std::string& message)
      : std::runtime_error(message), category_(category) {}

  ErrorCategory category() const noexcept { return category_; }

 private:
  ErrorCategory category_;
};

[[noreturn]] inline void fail(ErrorCategory category, const std::string& message) {
  throw Error(category, message);
}

inline void require(bool condition, ErrorCategory category, const std::string& message) {
  if (!condition) fail(category, message);
}

}  // namespace fraclap
