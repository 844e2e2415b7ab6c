#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace photorecon {

enum class ErrorKind {
  invalid_argument,
  parse,
  negative_probability,
  sum_deviates,
  dimension_mismatch,
  overflow,
  config_invalid,
  invalid_distribution,
  zero_norm,
  io,
};

constexpr std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::invalid_argument: return "invalid-argument";
    case ErrorKind::parse: return "parse-error";
    case ErrorKind::negative_probability: return "negative-probability";
    case ErrorKind::sum_deviates: return "sum-deviates";
    case ErrorKind::dimension_mismatch: return "dimension-mismatch";
    case ErrorKind::overflow: return "overflow";
    case ErrorKind::config_invalid: return "config-invalid";
    case ErrorKind::invalid_distribution: return "invalid-distribution";
    case ErrorKind::zero_norm: return "zero-norm";
    case ErrorKind::io: return "io-error";
  }
  return "unknown";
}

// Single exception type for the library; callers dispatch on kind().
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message)
      : std::runtime_error(message), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

  // Numerical failures (as opposed to bad input) map to a distinct exit code.
  bool is_numerical() const noexcept {
    return kind_ == ErrorKind::overflow || kind_ == ErrorKind::zero_norm;
  }

 private:
  ErrorKind kind_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& message) {
  throw Error(kind, message);
}

inline void require(bool condition, ErrorKind kind, const std::string& message) {
  if (!condition) fail(kind, message);
}

}  // namespace photorecon
