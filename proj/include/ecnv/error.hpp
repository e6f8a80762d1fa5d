#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace ecnv {

/// Failure categories; each maps to one CLI exit code.
enum class ErrorCategory { config, invalid_parameter, invariant, blow_up, selftest };

class Error : public std::runtime_error {
 public:
  Error(ErrorCategory category, const std::string& what)
      : std::runtime_error(what), category_(category) {}

  ErrorCategory category() const noexcept { return category_; }

 private:
  ErrorCategory category_;
};

class ConfigError : public Error {
 public:
  explicit ConfigError(const std::string& what) : Error(ErrorCategory::config, what) {}
};

class InvalidParameter : public Error {
 public:
  explicit InvalidParameter(const std::string& what)
      : Error(ErrorCategory::invalid_parameter, what) {}
};

class InvariantViolation : public Error {
 public:
  explicit InvariantViolation(const std::string& what)
      : Error(ErrorCategory::invariant, what) {}
};

std::string_view category_name(ErrorCategory category) noexcept;

}  // namespace ecnv
