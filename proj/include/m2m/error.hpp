#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace m2m {

enum class ErrorCategory {
  InvalidArgument,
  Config,
  Infeasible,
  Unfittable,
  Io,
};

std::string_view to_string(ErrorCategory category);

/// Library error carrying a machine-readable category for the CLI.
class Error : public std::runtime_error {
 public:
  Error(ErrorCategory category, const std::string& what)
      : std::runtime_error(what), category_(category) {}

  ErrorCategory category() const { return category_; }

 private:
  ErrorCategory category_;
};

[[noreturn]] inline void fail(ErrorCategory category, const std::string& what) {
  throw Error(category, what);
}

inline void require(bool condition, const std::string& what) {
  if (!condition) throw Error(ErrorCategory::InvalidArgument, what);
}

}  // namespace m2m
