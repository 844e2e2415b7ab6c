#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <random>
#include <string>
#include <string_view>
#include <vector>

#include "photorecon/detector_model.hpp"
#include "photorecon/error.hpp"

namespace photorecon {

// std::mt19937_64 is fully specified by the C++ standard (its 10000th output
// from the default seed is 9981545732273789042), so streams reproduce across
// platforms and languages.
inline constexpr std::string_view kGeneratorName = "mt19937_64";

struct SamplingConfig {
  long long events = 1;  // number of measurement events, nu
  std::uint64_t seed = 0;

  void validate() const {
    require(events >= 1, ErrorKind::invalid_argument,
            "sampling events must be >= 1, got " + std::to_string(events));
  }
};

struct SampledCounts {
  CountDistribution frequencies;   // histogram / events
  std::vector<long long> histogram;
  double normalization_defect = 0.0;  // sum(true_dist) - 1 before renormalizing
};

/// Uniform double in [0, 1) from the top 53 bits of one generator output.
inline double unit_uniform(std::mt19937_64& gen) {
  return static_cast<double>(gen() >> 11) * 0x1.0p-53;
}

/// Draw `events` i.i.d. photocount values from true_dist by inverse-CDF
/// lookup and histogram them.
inline SampledCounts sample_histogram(const CountDistribution& true_dist,
                                      const SamplingConfig& cfg) {
  cfg.validate();
  require(!true_dist.probs.empty(), ErrorKind::invalid_distribution,
          "sample_counts: empty distribution");
  double total = 0.0;
  for (std::size_t m = 0; m < true_dist.size(); ++m) {
    const double p = true_dist.probs[m];
    require(p >= 0.0 && std::isfinite(p), ErrorKind::invalid_distribution,
            "sample_counts: entry " + std::to_string(m) + " is negative or non-finite");
    total += p;
  }
  require(std::fabs(total - 1.0) <= 1e-9, ErrorKind::invalid_distribution,
          "sample_counts: distribution sums to " + std::to_string(total) +
              ", expected 1 within 1e-9");

  std::vector<double> cdf(true_dist.size());
  double running = 0.0;
  std::size_t last_positive = 0;
  for (std::size_t m = 0; m < cdf.size(); ++m) {
    running += true_dist.probs[m] / total;
    cdf[m] = running;
    if (true_dist.probs[m] > 0.0) last_positive = m;
  }

  SampledCounts out;
  out.normalization_defect = total - 1.0;
  out.histogram.assign(cdf.size(), 0);
  std::mt19937_64 gen(cfg.seed);
  for (long long i = 0; i < cfg.events; ++i) {
    const double u = unit_uniform(gen);
    auto idx = static_cast<std::size_t>(std::upper_bound(cdf.begin(), cdf.end(), u) - cdf.begin());
    // Rounding can leave cdf.back() a hair below 1.
    if (idx > last_positive) idx = last_positive;
    ++out.histogram[idx];
  }
  out.frequencies.probs.resize(cdf.size());
  for (std::size_t m = 0; m < cdf.size(); ++m) {
    out.frequencies.probs[m] =
        static_cast<double>(out.histogram[m]) / static_cast<double>(cfg.events);
  }
  return out;
}

inline CountDistribution sample_counts(const CountDistribution& true_dist,
                                       const SamplingConfig& cfg) {
  return sample_histogram(true_dist, cfg).frequencies;
}

}  // namespace photorecon
