#pragma once

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "photorecon/error.hpp"
#include "photorecon/special_functions.hpp"

namespace photorecon {

/// Photon-number distribution p_0..p_N on a finite window.
///
/// truncation_tail is an upper bound on the probability mass beyond N, so
/// sum(probs) lies in [1 - truncation_tail, 1 + 1e-12].
struct PhotonDistribution {
  std::vector<double> probs;
  double truncation_tail = 0.0;

  std::size_t size() const { return probs.size(); }
  int n_max() const { return static_cast<int>(probs.size()) - 1; }
};

namespace detail {

inline void check_state_args(const char* name, double param, double tail) {
  require(param > 0.0 && std::isfinite(param), ErrorKind::invalid_argument,
          std::string(name) + ": parameter must be positive, got " + std::to_string(param));
  require(tail > 0.0 && tail < 1.0, ErrorKind::invalid_argument,
          std::string(name) + ": tail must lie in (0, 1), got " + std::to_string(tail));
}

// Analytic tail, widened if rounding left the window sum a hair lower.
inline double recorded_tail(double analytic, const std::vector<double>& probs) {
  double sum = 0.0;
  for (double p : probs) sum += p;
  return std::max(analytic, 1.0 - sum);
}

// Hard cap on generated windows; reached only for absurd (mean, tail) pairs.
constexpr int kMaxWindow = 1'000'000;

}  // namespace detail

/// Thermal state: p_n = (1/(1+m)) (m/(1+m))^n. The remaining tail after N is
/// exactly r^(N+1), r = m/(1+m).
inline PhotonDistribution thermal(double mean_n, double tail) {
  detail::check_state_args("thermal", mean_n, tail);
  const double r = mean_n / (1.0 + mean_n);
  const double log_r = std::log(r);
  PhotonDistribution out;
  double log_p = -std::log1p(mean_n);
  for (int n = 0; n <= detail::kMaxWindow; ++n) {
    out.probs.push_back(std::exp(log_p));
    const double remaining = std::exp((n + 1) * log_r);
    if (remaining <= tail) {
      out.truncation_tail = detail::recorded_tail(remaining, out.probs);
      return out;
    }
    log_p += log_r;
  }
  fail(ErrorKind::invalid_argument, "thermal: window exceeds maximum size");
}

/// Single-photon-added thermal state: p_n = n/(m(1+m)) (m/(1+m))^n.
inline PhotonDistribution spats(double mean_n, double tail) {
  detail::check_state_args("spats", mean_n, tail);
  const double r = mean_n / (1.0 + mean_n);
  const double log_r = std::log(r);
  const double log_norm = -std::log(mean_n) - std::log1p(mean_n);
  PhotonDistribution out;
  out.probs.push_back(0.0);
  for (int n = 1; n <= detail::kMaxWindow; ++n) {
    out.probs.push_back(std::exp(log_norm + std::log(static_cast<double>(n)) + n * log_r));
    // sum_{j>=K} j r^j (1-r)^2 / r = r^(K-1) (K(1-r) + r), K = n + 1
    const double k = n + 1.0;
    const double remaining = std::exp(n * log_r) * (k * (1.0 - r) + r);
    if (remaining <= tail) {
      out.truncation_tail = detail::recorded_tail(remaining, out.probs);
      return out;
    }
  }
  fail(ErrorKind::invalid_argument, "spats: window exceeds maximum size");
}

/// Even coherent-state superposition |alpha> + |-alpha>, alpha_sq = |alpha|^2.
/// Odd entries are exactly zero; even entries are evaluated in log space.
inline PhotonDistribution even_cat(double alpha_sq, double tail) {
  detail::check_state_args("even_cat", alpha_sq, tail);
  const double log_norm = std::log(2.0) - alpha_sq - std::log1p(std::exp(-2.0 * alpha_sq));
  const double log_a = std::log(alpha_sq);
  auto log_p = [&](int n) { return log_norm + n * log_a - log_factorial(n); };

  PhotonDistribution out;
  double cumulative = 0.0;
  for (int n = 0; n <= detail::kMaxWindow; ++n) {
    const double p = (n % 2 == 0) ? std::exp(log_p(n)) : 0.0;
    out.probs.push_back(p);
    cumulative += p;
    if (n % 2 == 0 && cumulative >= 1.0 - tail) {
      // Tail bound: sum the discarded even terms until they stop contributing.
      double remaining = 0.0;
      for (int j = n + 2;; j += 2) {
        const double t = std::exp(log_p(j));
        remaining += t;
        if (t <= remaining * 1e-17 || t == 0.0) break;
      }
      if (remaining <= tail) {
        out.truncation_tail = std::max(remaining, 1.0 - cumulative);
        return out;
      }
    }
  }
  fail(ErrorKind::invalid_argument, "even_cat: window exceeds maximum size");
}

/// Fock state |n>: delta distribution on photon number n.
inline PhotonDistribution fock(int n) {
  require(n >= 0, ErrorKind::invalid_argument,
          "fock: n must be nonnegative, got " + std::to_string(n));
  PhotonDistribution out;
  out.probs.assign(static_cast<std::size_t>(n) + 1, 0.0);
  out.probs.back() = 1.0;
  return out;
}

}  // namespace photorecon
