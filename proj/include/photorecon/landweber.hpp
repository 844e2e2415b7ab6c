#pragma once

#include <algorithm>
#include <cmath>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "photorecon/detector_model.hpp"
#include "photorecon/error.hpp"

namespace photorecon {

/// Closed convex set C: nonnegative vectors, optionally restricted to a support.
struct ConstraintSet {
  // true = photon number allowed. Absent means every n is allowed.
  std::optional<std::vector<bool>> support_mask;

  static ConstraintSet nonnegative() { return {}; }

  static ConstraintSet even_support(std::size_t size) {
    std::vector<bool> mask(size);
    for (std::size_t n = 0; n < size; ++n) mask[n] = (n % 2 == 0);
    return {std::move(mask)};
  }
};

/// Euclidean projection onto C.
inline std::vector<double> project(std::vector<double> v, const ConstraintSet& c) {
  if (c.support_mask) {
    require(c.support_mask->size() == v.size(), ErrorKind::dimension_mismatch,
            "project: mask has " + std::to_string(c.support_mask->size()) +
                " entries, vector has " + std::to_string(v.size()));
  }
  for (std::size_t n = 0; n < v.size(); ++n) {
    const bool allowed = !c.support_mask || (*c.support_mask)[n];
    v[n] = allowed ? std::max(0.0, v[n]) : 0.0;
  }
  return v;
}

/// Largest singular value by power iteration on A^T A, started from the
/// normalized all-ones vector so the result is deterministic.
inline double largest_singular_value(const Eigen::MatrixXd& a) {
  require(a.size() > 0, ErrorKind::invalid_argument, "largest_singular_value: empty matrix");
  Eigen::VectorXd v = Eigen::VectorXd::Ones(a.cols()).normalized();
  double lambda = 0.0;
  for (int it = 0; it < 100000; ++it) {
    const Eigen::VectorXd w = a.transpose() * (a * v);
    const double next = w.norm();
    if (next == 0.0) return 0.0;
    v = w / next;
    if (std::fabs(next - lambda) <= 1e-14 * next) {
      lambda = next;
      break;
    }
    lambda = next;
  }
  return std::sqrt(lambda);
}

/// Relaxation parameter 1 / sigma_max(S)^2, the midpoint of the convergent
/// range (0, 2 / sigma_max^2).
inline double auto_chi(const ResponseMatrix& mat) {
  const double sigma = largest_singular_value(mat.entries);
  require(sigma > 0.0, ErrorKind::invalid_argument, "auto_chi: response matrix is zero");
  return 1.0 / (sigma * sigma);
}

struct LandweberConfig {
  std::optional<double> chi;  // empty = auto_chi
  int max_iterations = 100000;
  double discrepancy_tau = 1.1;
  // Estimated Euclidean norm of the data error; 0 disables the discrepancy stop.
  double noise_level = 0.0;
  double stagnation_tol = 1e-9;
  // Starting iterate; empty = all zeros.
  std::optional<std::vector<double>> initial;

  void validate() const {
    require(max_iterations >= 1, ErrorKind::config_invalid, "max_iterations must be >= 1");
    require(discrepancy_tau >= 1.0, ErrorKind::config_invalid, "discrepancy_tau must be >= 1");
    require(noise_level >= 0.0 && std::isfinite(noise_level), ErrorKind::config_invalid,
            "noise_level must be finite and >= 0");
    require(stagnation_tol >= 0.0, ErrorKind::config_invalid, "stagnation_tol must be >= 0");
  }
};

enum class StopReason { discrepancy, stagnation, max_iterations };

constexpr std::string_view to_string(StopReason reason) {
  switch (reason) {
    case StopReason::discrepancy: return "discrepancy";
    case StopReason::stagnation: return "stagnation";
    case StopReason::max_iterations: return "max_iterations";
  }
  return "unknown";
}

struct SolveReport {
  std::vector<double> estimate;
  int iterations_run = 0;
  // Per iteration j >= 1: ||S p_j - P|| and sum_n p_j[n].
  std::vector<double> residual_history;
  std::vector<double> normalization_history;
  StopReason stop_reason = StopReason::max_iterations;
  double chi = 0.0;
};

/// Expected Euclidean error of empirical frequencies from `events` multinomial
/// draws: sqrt((1 - sum P_m^2) / events).
inline double sampling_noise_level(const CountDistribution& counts, long long events) {
  require(events >= 1, ErrorKind::invalid_argument, "sampling_noise_level: events must be >= 1");
  double sum_sq = 0.0;
  for (double p : counts.probs) sum_sq += p * p;
  return std::sqrt(std::max(0.0, 1.0 - sum_sq) / static_cast<double>(events));
}

/// Projected Landweber iteration
///   p_j = Pi_C[ p_{j-1} + chi S^T (P - S p_{j-1}) ]
/// stopped by the discrepancy principle (||S p_j - P|| <= tau * noise_level),
/// by stagnation of the iterate, or by the iteration cap.
inline SolveReport solve(const ResponseMatrix& mat, const CountDistribution& counts,
                         const ConstraintSet& constraints, const LandweberConfig& cfg) {
  cfg.validate();
  const Eigen::Index rows = mat.entries.rows();
  const Eigen::Index cols = mat.entries.cols();
  require(counts.size() == static_cast<std::size_t>(rows), ErrorKind::dimension_mismatch,
          "solve: counts have " + std::to_string(counts.size()) + " entries, matrix has " +
              std::to_string(rows) + " rows");
  if (constraints.support_mask) {
    require(constraints.support_mask->size() == static_cast<std::size_t>(cols),
            ErrorKind::dimension_mismatch, "solve: support mask length differs from matrix columns");
  }

  double chi = 0.0;
  if (cfg.chi) {
    const double sigma = largest_singular_value(mat.entries);
    const double bound = 2.0 / (sigma * sigma);
    require(*cfg.chi > 0.0 && *cfg.chi < bound, ErrorKind::config_invalid,
            "chi=" + std::to_string(*cfg.chi) + " outside the convergent range (0, " +
                std::to_string(bound) + ")");
    chi = *cfg.chi;
  } else {
    chi = auto_chi(mat);
  }

  const Eigen::Map<const Eigen::VectorXd> data(counts.probs.data(), rows);
  Eigen::VectorXd p = Eigen::VectorXd::Zero(cols);
  if (cfg.initial) {
    require(cfg.initial->size() == static_cast<std::size_t>(cols), ErrorKind::dimension_mismatch,
            "solve: initial iterate length differs from matrix columns");
    p = Eigen::Map<const Eigen::VectorXd>(cfg.initial->data(), cols);
  }

  const auto& mask = constraints.support_mask;
  SolveReport report;
  report.chi = chi;
  const double threshold = cfg.discrepancy_tau * cfg.noise_level;
  Eigen::VectorXd residual = mat.entries * p - data;
  Eigen::VectorXd next(cols);
  for (int j = 1; j <= cfg.max_iterations; ++j) {
    next = p - chi * (mat.entries.transpose() * residual);
    for (Eigen::Index n = 0; n < cols; ++n) {
      const bool allowed = !mask || (*mask)[static_cast<std::size_t>(n)];
      next[n] = allowed ? std::max(0.0, next[n]) : 0.0;
    }
    const double step = (next - p).norm();
    const double size = next.norm();
    p.swap(next);
    residual = mat.entries * p - data;

    const double residual_norm = residual.norm();
    report.residual_history.push_back(residual_norm);
    report.normalization_history.push_back(p.sum());
    report.iterations_run = j;

    if (residual_norm <= threshold) {
      report.stop_reason = StopReason::discrepancy;
      break;
    }
    const double change = size > 0.0 ? step / size : (step == 0.0 ? 0.0 : 1.0);
    if (change < cfg.stagnation_tol) {
      report.stop_reason = StopReason::stagnation;
      break;
    }
    report.stop_reason = StopReason::max_iterations;
  }
  report.estimate.assign(p.data(), p.data() + p.size());
  return report;
}

}  // namespace photorecon
