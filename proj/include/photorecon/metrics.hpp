#pragma once

#include <algorithm>
#include <cmath>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "photorecon/detector_model.hpp"
#include "photorecon/error.hpp"

namespace photorecon {

struct ErrorReport {
  double relative_error = 0.0;     // ||estimate - truth|| / ||truth||
  double relative_residual = 0.0;  // ||S estimate - measured|| / ||measured||
  double normalization_defect = 0.0;  // sum(estimate) - 1
};

/// ||estimate - truth||_2 / ||truth||_2, zero-padding the shorter vector.
inline double relative_error(std::span<const double> estimate, std::span<const double> truth) {
  const std::size_t len = std::max(estimate.size(), truth.size());
  double diff_sq = 0.0;
  double truth_sq = 0.0;
  for (std::size_t i = 0; i < len; ++i) {
    const double e = i < estimate.size() ? estimate[i] : 0.0;
    const double t = i < truth.size() ? truth[i] : 0.0;
    diff_sq += (e - t) * (e - t);
    truth_sq += t * t;
  }
  require(truth_sq > 0.0, ErrorKind::zero_norm, "relative_error: reference vector has zero norm");
  return std::sqrt(diff_sq / truth_sq);
}

/// ||S estimate - measured||_2 / ||measured||_2.
inline double relative_residual(const ResponseMatrix& mat, std::span<const double> estimate,
                                const CountDistribution& measured) {
  require(estimate.size() <= static_cast<std::size_t>(mat.entries.cols()),
          ErrorKind::dimension_mismatch,
          "relative_residual: estimate longer than the matrix has columns");
  require(measured.size() == static_cast<std::size_t>(mat.entries.rows()),
          ErrorKind::dimension_mismatch,
          "relative_residual: measured distribution length differs from matrix rows");
  const auto k = static_cast<Eigen::Index>(estimate.size());
  const Eigen::Map<const Eigen::VectorXd> p(estimate.data(), k);
  const Eigen::Map<const Eigen::VectorXd> data(measured.probs.data(), mat.entries.rows());
  const double data_norm = data.norm();
  require(data_norm > 0.0, ErrorKind::zero_norm,
          "relative_residual: measured distribution has zero norm");
  return (mat.entries.leftCols(k) * p - data).norm() / data_norm;
}

inline double normalization_defect(std::span<const double> estimate) {
  double sum = 0.0;
  for (double v : estimate) sum += v;
  return sum - 1.0;
}

inline ErrorReport evaluate(const ResponseMatrix& mat, std::span<const double> estimate,
                            std::span<const double> truth, const CountDistribution& measured) {
  return {relative_error(estimate, truth), relative_residual(mat, estimate, measured),
          normalization_defect(estimate)};
}

}  // namespace photorecon
