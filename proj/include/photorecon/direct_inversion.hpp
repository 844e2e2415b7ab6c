#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include "photorecon/detector_model.hpp"
#include "photorecon/error.hpp"
#include "photorecon/signed_log.hpp"
#include "photorecon/special_functions.hpp"

namespace photorecon {

/// Analytic inverse of the (infinite) response matrix, S^-1_{n|m}, stored in
/// signed-log form because entries for small eta reach far beyond 1e300.
struct InverseMatrix {
  int n_max = 0;
  int m_max = 0;
  DetectorParams params;
  std::vector<SignedLogValue> entries;  // row-major, rows n, columns m

  const SignedLogValue& operator()(int n, int m) const {
    return entries[static_cast<std::size_t>(n) * (m_max + 1) + m];
  }

  /// ln of the Euclidean norm of row n.
  double row_log_norm(int n) const {
    double top = -std::numeric_limits<double>::infinity();
    for (int m = 0; m <= m_max; ++m) {
      const auto& v = (*this)(n, m);
      if (!v.is_zero()) top = std::max(top, v.log_magnitude);
    }
    if (top == -std::numeric_limits<double>::infinity()) return top;
    double acc = 0.0;
    for (int m = 0; m <= m_max; ++m) {
      const auto& v = (*this)(n, m);
      if (!v.is_zero()) acc += std::exp(2.0 * (v.log_magnitude - top));
    }
    return top + 0.5 * std::log(acc);
  }
};

/// S^-1_{n|m}:
///   m <= n:  eta^-n Phi(n+1, n-m+1; x) e^N (-N)^(n-m) / (n-m)!
///   m >= n:  e^N Phi(m+1, m-n+1; x) C(m, n) eta^-n (1 - 1/eta)^(m-n)
/// with x = N (1 - eta) / eta >= 0.
inline SignedLogValue inverse_entry(const DetectorParams& params, int n, int m) {
  params.validate();
  require(n >= 0 && m >= 0, ErrorKind::invalid_argument,
          "inverse_entry: indices must be nonnegative");
  const double eta = params.eta;
  const double noise = params.n_noise;
  const double x = noise * (1.0 - eta) / eta;
  const int sign = ((n > m ? n - m : m - n) % 2 == 0) ? 1 : -1;

  double log_value = noise - n * std::log(eta);
  SignedLogValue phi;
  if (m <= n) {
    const int gap = n - m;
    if (gap > 0) {
      if (noise == 0.0) return SignedLogValue::zero();
      log_value += gap * std::log(noise) - log_factorial(gap);
    }
    phi = kummer_phi(n + 1, gap + 1, x);
  } else {
    const int gap = m - n;
    if (eta == 1.0) return SignedLogValue::zero();
    log_value += log_binomial(m, n) + gap * std::log(1.0 / eta - 1.0);
    phi = kummer_phi(m + 1, gap + 1, x);
  }
  const auto out = SignedLogValue::from_log(log_value, sign) * phi;
  require(std::isfinite(out.log_magnitude), ErrorKind::overflow,
          "inverse_entry: log-magnitude not representable at (n=" + std::to_string(n) +
              ", m=" + std::to_string(m) + ")");
  return out;
}

inline InverseMatrix build_inverse(const DetectorParams& params, int n_max, int m_max) {
  params.validate();
  require(n_max >= 0 && m_max >= 0, ErrorKind::invalid_argument,
          "build_inverse: window sizes must be nonnegative");
  InverseMatrix out{n_max, m_max, params, {}};
  out.entries.reserve(static_cast<std::size_t>(n_max + 1) * (m_max + 1));
  for (int n = 0; n <= n_max; ++n) {
    for (int m = 0; m <= m_max; ++m) out.entries.push_back(inverse_entry(params, n, m));
  }
  return out;
}

namespace detail {

// Neumaier-compensated sum of terms taken in ascending magnitude.
inline double compensated_sum(std::vector<double>& terms) {
  std::sort(terms.begin(), terms.end(),
            [](double a, double b) { return std::fabs(a) < std::fabs(b); });
  double sum = 0.0;
  double carry = 0.0;
  for (double t : terms) {
    const double next = sum + t;
    if (std::fabs(sum) >= std::fabs(t)) {
      carry += (sum - next) + t;
    } else {
      carry += (t - next) + sum;
    }
    sum = next;
  }
  return sum + carry;
}

}  // namespace detail

/// p_n = sum_m S^-1_{n|m} P_m, returned raw: entries may be negative and the
/// vector is not normalized. Throws ErrorKind::overflow naming (n, m) when a
/// term leaves the double range.
inline std::vector<double> direct_reconstruct(const InverseMatrix& inverse,
                                              const CountDistribution& counts) {
  require(counts.size() == static_cast<std::size_t>(inverse.m_max) + 1,
          ErrorKind::dimension_mismatch,
          "direct_reconstruct: counts have " + std::to_string(counts.size()) +
              " entries but the inverse has " + std::to_string(inverse.m_max + 1) + " columns");
  std::vector<double> out(static_cast<std::size_t>(inverse.n_max) + 1);
  std::vector<double> terms;
  for (int n = 0; n <= inverse.n_max; ++n) {
    terms.clear();
    for (int m = 0; m <= inverse.m_max; ++m) {
      const double pm = counts.probs[static_cast<std::size_t>(m)];
      require(std::isfinite(pm), ErrorKind::invalid_argument,
              "direct_reconstruct: non-finite count probability at m=" + std::to_string(m));
      const auto term = inverse(n, m) * SignedLogValue::from_double(pm);
      require(term.fits_double(), ErrorKind::overflow,
              "direct_reconstruct: term S^-1[" + std::to_string(n) + "][" + std::to_string(m) +
                  "] * P exceeds double range (log-magnitude " +
                  std::to_string(term.log_magnitude) + ")");
      terms.push_back(term.to_double());
    }
    const double value = detail::compensated_sum(terms);
    require(std::isfinite(value), ErrorKind::overflow,
            "direct_reconstruct: sum for n=" + std::to_string(n) + " exceeds double range");
    out[static_cast<std::size_t>(n)] = value;
  }
  return out;
}

inline std::vector<double> direct_reconstruct(const DetectorParams& params,
                                              const CountDistribution& counts, int n_max) {
  require(!counts.probs.empty(), ErrorKind::invalid_argument,
          "direct_reconstruct: empty count distribution");
  const auto inverse = build_inverse(params, n_max, static_cast<int>(counts.size()) - 1);
  return direct_reconstruct(inverse, counts);
}

}  // namespace photorecon
