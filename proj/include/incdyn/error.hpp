#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace incdyn {

/// Error categories surfaced by the CLI as machine-readable codes.
enum class ErrorCategory { usage, domain, numeric, io };

inline std::string_view to_string(ErrorCategory c) {
  switch (c) {
    case ErrorCategory::usage: return "usage";
    case ErrorCategory::domain: return "domain";
    case ErrorCategory::numeric: return "numeric";
    case ErrorCategory::io: return "io";
  }
  return "unknown";
}

class Error : public std::runtime_error {
 public:
  Error(ErrorCategory category, const std::string& what)
      : std::runtime_error(what), category_(category) {}

  ErrorCategory category() const noexcept { return category_; }

 private:
  ErrorCategory category_;
};

struct UsageError : Error {
  explicit UsageError(const std::string& what) : Error(ErrorCategory::usage, what) {}
};

struct DomainError : Error {
  explicit DomainError(const std::string& what) : Error(ErrorCategory::domain, what) {}
};

// Carries the best estimate reached before giving up (last Newton iterate,
// partial quadrature sum, ...).
struct NumericError : Error {
  NumericError(const std::string& what, double best_estimate)
      : Error(ErrorCategory::numeric, what), estimate(best_estimate) {}
  double estimate;
};

struct IoError : Error {
  explicit IoError(const std::string& what) : Error(ErrorCategory::io, what) {}
};

}  // namespace incdyn
