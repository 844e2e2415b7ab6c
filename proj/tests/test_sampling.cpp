#include "photorecon/sampling.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "gtest/gtest.h"
#include "photorecon/metrics.hpp"
#include "photorecon/states.hpp"

using namespace photorecon;

namespace {

CountDistribution thermal_counts() {
  const auto p = thermal(30, 1e-10);
  const DetectorParams params{0.34, 0.30};
  return forward(build_response(params, p.n_max(), suggest_m_max(params, p.n_max(), 1e-10)), p);
}

// The forward image loses up to 1e-10 of mass; renormalize for the sampler.
CountDistribution normalized(CountDistribution c) {
  const double s = std::accumulate(c.probs.begin(), c.probs.end(), 0.0);
  for (double& v : c.probs) v /= s;
  return c;
}

}  // namespace

TEST(sampling, generator_reference_value) {
  std::mt19937_64 gen;
  gen.discard(9999);
  EXPECT_EQ(gen(), 9981545732273789042ULL);
  EXPECT_EQ(kGeneratorName, "mt19937_64");
}

TEST(sampling, degenerate_distribution) {
  for (long long nu : {1LL, 17LL, 100000LL}) {
    EXPECT_EQ(sample_counts(CountDistribution{{1.0, 0.0, 0.0}}, {nu, 42}).probs,
              (std::vector<double>{1.0, 0.0, 0.0}));
  }
  EXPECT_EQ(sample_counts(CountDistribution{{0.0, 0.0, 1.0}}, {1000, 1}).probs,
            (std::vector<double>{0.0, 0.0, 1.0}));
}

TEST(sampling, frequencies_are_multiples_of_inverse_events) {
  const auto truth = thermal_counts();
  const long long nu = 5000;
  const auto out = sample_histogram(truth, {nu, 9});
  EXPECT_EQ(std::accumulate(out.histogram.begin(), out.histogram.end(), 0LL), nu);
  for (std::size_t m = 0; m < out.histogram.size(); ++m) {
    EXPECT_EQ(out.frequencies.probs[m], static_cast<double>(out.histogram[m]) / nu);
  }
  EXPECT_LE(std::fabs(out.normalization_defect), 1e-9);
}

TEST(sampling, reproducible) {
  const auto truth = thermal_counts();
  EXPECT_EQ(sample_counts(truth, {20000, 5}).probs, sample_counts(truth, {20000, 5}).probs);
  EXPECT_NE(sample_counts(truth, {20000, 5}).probs, sample_counts(truth, {20000, 6}).probs);
}

TEST(sampling, law_of_large_numbers) {
  const auto truth = thermal_counts();
  const long long nu = 10000000;
  const auto sampled = sample_counts(truth, {nu, 11});
  // Expected squared error of multinomial frequencies is (1 - sum P^2) / nu.
  double sum_sq = 0.0;
  for (double v : truth.probs) sum_sq += v * v;
  const double scale = std::sqrt((1.0 - sum_sq) / static_cast<double>(nu) / sum_sq);
  EXPECT_LE(relative_error(sampled.probs, truth.probs), 3.0 * scale);
}

TEST(sampling, error_scales_as_inverse_sqrt_events) {
  const auto truth = normalized(thermal_counts());
  auto median_error = [&](long long nu) {
    std::vector<double> errs;
    for (std::uint64_t seed = 1; seed <= 20; ++seed) {
      errs.push_back(relative_error(sample_counts(truth, {nu, seed}).probs, truth.probs));
    }
    std::nth_element(errs.begin(), errs.begin() + 10, errs.end());
    return errs[10];
  };
  const double ratio = median_error(5000) / median_error(20000);
  EXPECT_GE(ratio, 2.0 / 1.3);
  EXPECT_LE(ratio, 2.0 * 1.3);
}

TEST(sampling, thermal_error_magnitude) {
  // Expected relative error at 5e4 events is about 0.025; stay within +-50%
  // of 0.03 for most seeds.
  const auto truth = thermal_counts();
  int inside = 0;
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    const double d = relative_error(sample_counts(truth, {50000, seed}).probs, truth.probs);
    inside += (d >= 0.015 && d <= 0.045) ? 1 : 0;
  }
  EXPECT_GE(inside, 4);
}

TEST(sampling, rejects_invalid_input) {
  auto kind_of = [](const CountDistribution& c, long long nu) {
    try {
      sample_counts(c, {nu, 0});
    } catch (const Error& e) {
      return e.kind();
    }
    return ErrorKind::io;
  };
  EXPECT_EQ(kind_of(CountDistribution{{0.5, -0.1, 0.6}}, 10), ErrorKind::invalid_distribution);
  EXPECT_EQ(kind_of(CountDistribution{{0.5, 0.3}}, 10), ErrorKind::invalid_distribution);
  EXPECT_EQ(kind_of(CountDistribution{{}}, 10), ErrorKind::invalid_distribution);
  EXPECT_EQ(kind_of(CountDistribution{{1.0}}, 0), ErrorKind::invalid_argument);
}
