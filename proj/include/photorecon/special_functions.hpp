#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>
#include <string>

#include "photorecon/error.hpp"
#include "photorecon/signed_log.hpp"

namespace photorecon {

namespace detail {

inline const std::array<double, 21>& log_factorial_table() {
  static const std::array<double, 21> table = [] {
    std::array<double, 21> t{};
    std::uint64_t f = 1;
    for (std::size_t i = 0; i < t.size(); ++i) {
      if (i > 0) f *= i;
      t[i] = std::log(static_cast<double>(f));
    }
    return t;
  }();
  return table;
}

// ln Gamma(z) for z >= 21 from the asymptotic series; the first omitted term is
// below 1e-17 at z = 21.
inline double log_gamma_large(double z) {
  const double inv = 1.0 / z;
  const double inv2 = inv * inv;
  const double series =
      inv * (1.0 / 12.0 +
             inv2 * (-1.0 / 360.0 +
                     inv2 * (1.0 / 1260.0 +
                             inv2 * (-1.0 / 1680.0 +
                                     inv2 * (1.0 / 1188.0 + inv2 * (-691.0 / 360360.0))))));
  return (z - 0.5) * std::log(z) - z + 0.5 * std::log(2.0 * std::numbers::pi) + series;
}

// Positive double kept as mantissa * exp(log_scale) so that long sums of
// positive terms neither overflow nor lose the exact value when they fit.
struct ScaledValue {
  double mantissa = 0.0;
  double log_scale = 0.0;

  double log() const { return std::log(mantissa) + log_scale; }
  SignedLogValue to_signed_log() const {
    return mantissa == 0.0 ? SignedLogValue::zero() : SignedLogValue::from_log(log(), 1);
  }
};

constexpr double kRescaleAbove = 1e280;

}  // namespace detail

/// ln(n!). Exact table for n <= 20, log-gamma series beyond.
inline double log_factorial(int n) {
  require(n >= 0, ErrorKind::invalid_argument,
          "log_factorial: n must be nonnegative, got " + std::to_string(n));
  const auto& table = detail::log_factorial_table();
  if (static_cast<std::size_t>(n) < table.size()) return table[static_cast<std::size_t>(n)];
  return detail::log_gamma_large(static_cast<double>(n) + 1.0);
}

/// ln C(n, k); -inf when k is outside [0, n].
inline double log_binomial(int n, int k) {
  if (n < 0 || k < 0 || k > n) return -std::numeric_limits<double>::infinity();
  return log_factorial(n) - log_factorial(k) - log_factorial(n - k);
}

/// C(n, k) as a double. Exact (correctly rounded) while the integer fits in 64 bits.
inline double binomial(int n, int k) {
  if (n < 0 || k < 0 || k > n) return 0.0;
  if (k > n - k) k = n - k;
  unsigned __int128 r = 1;
  for (int i = 0; i < k; ++i) {
    r = r * static_cast<unsigned>(n - i) / static_cast<unsigned>(i + 1);
    if (r > std::numeric_limits<std::uint64_t>::max()) {
      return std::exp(log_binomial(n, k));
    }
  }
  return static_cast<double>(static_cast<std::uint64_t>(r));
}

namespace detail {

// Defining sum of L_n^k(x) for x <= 0: sum_i C(n+k, n-i) y^i / i!, y = -x.
// Every term is nonnegative, so accumulation has no cancellation.
inline ScaledValue laguerre_nonpositive(int n, int k, double x) {
  const double y = -x;
  const int first = k < 0 ? -k : 0;
  if (first > n) return {};
  if (first > 0 && y == 0.0) return {};

  ScaledValue start;
  const double b = binomial(n + k, n - first);
  if (first == 0 && std::isfinite(b) && b < kRescaleAbove) {
    start = {b, 0.0};
  } else {
    start = {1.0, log_binomial(n + k, n - first) + first * std::log(y) - log_factorial(first)};
  }
  if (y == 0.0) return start;

  double term = start.mantissa;
  double sum = start.mantissa;
  double log_scale = start.log_scale;
  for (int i = first; i < n; ++i) {
    term *= (static_cast<double>(n - i) / static_cast<double>(k + i + 1)) *
            (y / static_cast<double>(i + 1));
    sum += term;
    if (sum > kRescaleAbove) {
      sum /= kRescaleAbove;
      term /= kRescaleAbove;
      log_scale += std::log(kRescaleAbove);
    }
  }
  return {sum, log_scale};
}

inline void check_laguerre_args(int n, int k) {
  require(n >= 0, ErrorKind::invalid_argument,
          "laguerre_assoc: n must be nonnegative, got " + std::to_string(n));
  require(k >= -n, ErrorKind::invalid_argument,
          "laguerre_assoc: k must be >= -n, got k=" + std::to_string(k) +
              " n=" + std::to_string(n));
}

}  // namespace detail

/// Associated Laguerre polynomial L_n^k(x) in signed-log form.
///
/// For x <= 0 (the only range the detector model produces) the defining sum
/// is accumulated term by term. For x > 0 the three-term recurrence is used.
inline SignedLogValue log_laguerre_assoc(int n, int k, double x) {
  detail::check_laguerre_args(n, k);
  if (x <= 0.0) return detail::laguerre_nonpositive(n, k, x).to_signed_log();

  double prev = 1.0;
  if (n == 0) return SignedLogValue::one();
  double cur = 1.0 + k - x;
  for (int j = 1; j < n; ++j) {
    const double next = ((2.0 * j + k + 1.0 - x) * cur - (j + k) * prev) / (j + 1.0);
    prev = cur;
    cur = next;
  }
  return SignedLogValue::from_double(cur);
}

/// Associated Laguerre polynomial L_n^k(x) for integer n >= 0 and k >= -n.
inline double laguerre_assoc(int n, int k, double x) {
  detail::check_laguerre_args(n, k);
  if (x <= 0.0) {
    const auto v = detail::laguerre_nonpositive(n, k, x);
    if (v.log_scale == 0.0) return v.mantissa;
    return v.to_signed_log().to_double();
  }
  return log_laguerre_assoc(n, k, x).to_double();
}

/// Kummer confluent hypergeometric function 1F1(a; b; x) for integer a, b >= 1
/// and x >= 0. All series terms are positive; summation stops once a term
/// falls below 1e-17 of the partial sum (at most 10000 terms).
inline SignedLogValue kummer_phi(int a, int b, double x) {
  require(a >= 1 && b >= 1, ErrorKind::invalid_argument,
          "kummer_phi: parameters must be >= 1, got a=" + std::to_string(a) +
              " b=" + std::to_string(b));
  require(x >= 0.0 && std::isfinite(x), ErrorKind::invalid_argument,
          "kummer_phi: x must be finite and >= 0, got " + std::to_string(x));
  if (x == 0.0) return SignedLogValue::one();

  constexpr int kMaxTerms = 10000;
  constexpr double kRelativeTol = 1e-17;
  double term = 1.0;
  double sum = 1.0;
  double log_scale = 0.0;
  for (int i = 0; i < kMaxTerms; ++i) {
    // Ratio of consecutive terms; decreasing in i for integer a, b >= 1.
    const double ratio = (a + i) * x / ((b + i) * (i + 1.0));
    term *= ratio;
    sum += term;
    if (sum > detail::kRescaleAbove) {
      sum /= detail::kRescaleAbove;
      term /= detail::kRescaleAbove;
      log_scale += std::log(detail::kRescaleAbove);
    }
    if (ratio < 1.0 && term < kRelativeTol * sum) {
      return SignedLogValue::from_log(std::log(sum) + log_scale, 1);
    }
  }
  fail(ErrorKind::overflow, "kummer_phi: series did not converge within 10000 terms (a=" +
                                std::to_string(a) + ", b=" + std::to_string(b) +
                                ", x=" + std::to_string(x) + ")");
}

}  // namespace photorecon
