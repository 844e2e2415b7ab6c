#pragma once

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "photorecon/error.hpp"
#include "photorecon/signed_log.hpp"
#include "photorecon/special_functions.hpp"
#include "photorecon/states.hpp"

namespace photorecon {

/// Detection efficiency eta in (0, 1] and mean number of noise counts
/// (dark counts plus background) per measurement window.
struct DetectorParams {
  double eta = 1.0;
  double n_noise = 0.0;

  void validate() const {
    require(eta > 0.0 && eta <= 1.0, ErrorKind::invalid_argument,
            "detector efficiency must lie in (0, 1], got " + std::to_string(eta));
    require(n_noise >= 0.0 && std::isfinite(n_noise), ErrorKind::invalid_argument,
            "mean noise counts must be finite and >= 0, got " + std::to_string(n_noise));
  }

  // Laguerre argument N (eta - 1) / eta, always <= 0.
  double laguerre_argument() const { return n_noise * (eta - 1.0) / eta; }
};

/// Photocount distribution P_0..P_M (probabilities or empirical frequencies).
struct CountDistribution {
  std::vector<double> probs;

  std::size_t size() const { return probs.size(); }
};

/// Truncated response matrix: entries(m, n) = S_{m|n}, the probability of m
/// counts given n photons, for m <= m_max and n <= n_max.
struct ResponseMatrix {
  Eigen::MatrixXd entries;
  DetectorParams params;
  // Per-column mass lost to the m_max truncation, 1 - sum_m S_{m|n}.
  std::vector<double> col_tail;

  int n_max() const { return static_cast<int>(entries.cols()) - 1; }
  int m_max() const { return static_cast<int>(entries.rows()) - 1; }

  double max_col_tail() const {
    return col_tail.empty() ? 0.0 : *std::max_element(col_tail.begin(), col_tail.end());
  }
};

/// ln S_{m|n} as a signed-log value (sign is 0 or +1).
///
/// For m >= n:  e^-N N^(m-n) eta^n n!/m! L_n^(m-n)(x)
/// for m <= n:  e^-N (1-eta)^(n-m) eta^m L_m^(n-m)(x)
/// with x = N (eta - 1) / eta <= 0.
inline SignedLogValue log_response_entry(const DetectorParams& params, int m, int n) {
  params.validate();
  require(m >= 0 && n >= 0, ErrorKind::invalid_argument,
          "response_entry: indices must be nonnegative");
  const double eta = params.eta;
  const double noise = params.n_noise;
  const double x = params.laguerre_argument();

  double log_value = -noise;
  if (m >= n) {
    const int gap = m - n;
    if (gap > 0) {
      if (noise == 0.0) return SignedLogValue::zero();
      log_value += gap * std::log(noise);
    }
    log_value += n * std::log(eta) + log_factorial(n) - log_factorial(m);
    return SignedLogValue::from_log(log_value) * log_laguerre_assoc(n, gap, x);
  }
  const int gap = n - m;
  if (eta == 1.0) return SignedLogValue::zero();
  log_value += gap * std::log1p(-eta) + m * std::log(eta);
  return SignedLogValue::from_log(log_value) * log_laguerre_assoc(m, gap, x);
}

inline double response_entry(const DetectorParams& params, int m, int n) {
  return log_response_entry(params, m, n).to_double();
}

/// Fill the (m_max+1) x (n_max+1) response matrix and its column tails.
inline ResponseMatrix build_response(const DetectorParams& params, int n_max, int m_max) {
  params.validate();
  require(n_max >= 0 && m_max >= 0, ErrorKind::invalid_argument,
          "build_response: window sizes must be nonnegative");
  ResponseMatrix out;
  out.params = params;
  out.entries.resize(m_max + 1, n_max + 1);
  out.col_tail.resize(static_cast<std::size_t>(n_max) + 1);
  for (int n = 0; n <= n_max; ++n) {
    double column_sum = 0.0;
    for (int m = 0; m <= m_max; ++m) {
      const double s = response_entry(params, m, n);
      out.entries(m, n) = s;
      column_sum += s;
    }
    out.col_tail[static_cast<std::size_t>(n)] = std::max(0.0, 1.0 - column_sum);
  }
  return out;
}

/// Smallest m_max for which column n_max loses at most `tail` mass.
inline int suggest_m_max(const DetectorParams& params, int n_max, double tail) {
  params.validate();
  require(n_max >= 0, ErrorKind::invalid_argument, "suggest_m_max: n_max must be >= 0");
  require(tail > 0.0 && tail < 1.0, ErrorKind::invalid_argument,
          "suggest_m_max: tail must lie in (0, 1)");
  double cumulative = 0.0;
  for (int m = 0;; ++m) {
    const double s = response_entry(params, m, n_max);
    cumulative += s;
    if (1.0 - cumulative <= tail) return m;
    // Without noise counts nothing lands above n_max.
    if (m >= n_max && params.n_noise == 0.0) return m;
    // Past n_max the column decays like a Poisson tail; once an entry
    // underflows the rest of the mass is below double resolution.
    if (m > n_max && s == 0.0) return m;
  }
}

/// P = S p. p may be shorter than the matrix has columns.
inline CountDistribution forward(const ResponseMatrix& mat, const PhotonDistribution& p) {
  require(p.size() <= static_cast<std::size_t>(mat.entries.cols()),
          ErrorKind::dimension_mismatch,
          "forward: distribution has " + std::to_string(p.size()) + " entries but matrix has " +
              std::to_string(mat.entries.cols()) + " columns");
  const auto k = static_cast<Eigen::Index>(p.size());
  const Eigen::Map<const Eigen::VectorXd> pv(p.probs.data(), k);
  const Eigen::VectorXd counts = mat.entries.leftCols(k) * pv;
  return {std::vector<double>(counts.data(), counts.data() + counts.size())};
}

}  // namespace photorecon
