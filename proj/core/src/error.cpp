#include "fraclap/error.hpp"

namespace fraclap {

std::string_view to_string(ErrorCategory category) noexcept {
  switch (category) {
    case ErrorCategory::invalid_argument: return "invalid-argument";
    case ErrorCategory::mismatch: return "mismatch";
    case ErrorCategory::numerical: return "numerical";
    case ErrorCategory::io: return "io";
    case ErrorCategory::config: return "config";
  }
  return "unknown";
}

}  // namespace fraclap
