#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <string>

#include "photorecon/error.hpp"

namespace photorecon {

/// A real number stored as sign * exp(log_magnitude).
///
/// Used for quantities such as n!/m!, N^(m-n) or (1 - 1/eta)^(m-n) that leave
/// the double range long before the final product does. A zero value has
/// sign == 0 and an unspecified log_magnitude.
struct SignedLogValue {
  double log_magnitude = -std::numeric_limits<double>::infinity();
  int sign = 0;

  static SignedLogValue zero() { return {}; }
  static SignedLogValue one() { return {0.0, 1}; }

  static SignedLogValue from_log(double log_magnitude, int sign = 1) {
    if (sign == 0 || log_magnitude == -std::numeric_limits<double>::infinity()) {
      return zero();
    }
    return {log_magnitude, sign > 0 ? 1 : -1};
  }

  static SignedLogValue from_double(double value) {
    if (value == 0.0) return zero();
    return {std::log(std::fabs(value)), value > 0.0 ? 1 : -1};
  }

  bool is_zero() const { return sign == 0; }

  // Largest log-magnitude that still converts to a finite double.
  static double max_log() { return std::log(std::numeric_limits<double>::max()); }

  bool fits_double() const { return sign == 0 || log_magnitude <= max_log(); }

  /// Throws ErrorKind::overflow instead of returning infinity.
  double to_double() const {
    if (sign == 0) return 0.0;
    require(fits_double(), ErrorKind::overflow,
            "value exp(" + std::to_string(log_magnitude) + ") exceeds double range");
    return sign * std::exp(log_magnitude);
  }

  SignedLogValue& operator*=(const SignedLogValue& other) {
    if (sign == 0 || other.sign == 0) {
      *this = zero();
    } else {
      log_magnitude += other.log_magnitude;
      sign *= other.sign;
    }
    return *this;
  }

  friend SignedLogValue operator*(SignedLogValue a, const SignedLogValue& b) { return a *= b; }

  SignedLogValue& operator/=(const SignedLogValue& other) {
    require(other.sign != 0, ErrorKind::invalid_argument, "division by zero in SignedLogValue");
    if (sign != 0) {
      log_magnitude -= other.log_magnitude;
      sign *= other.sign;
    }
    return *this;
  }

  friend SignedLogValue operator/(SignedLogValue a, const SignedLogValue& b) { return a /= b; }
};

}  // namespace photorecon
