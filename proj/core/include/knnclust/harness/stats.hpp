#pragma once

#include <cstddef>

namespace knnclust::harness {

inline constexpr double kWilsonZ95 = 1.959963984540054;

struct ProbabilityEstimate
{
  std::size_t successes = 0;
  std::size_t trials = 0;
  double p_hat = 0.0;
  double lower = 0.0;
  double upper = 0.0;

  double half_width() const { return 0.5 * (upper - lower); }
};

/// Wilson score interval:
///   center = (p + z^2 / (2n)) / (1 + z^2 / n)
///   half   = z / (1 + z^2 / n) * sqrt(p (1 - p) / n + z^2 / (4 n^2))
/// Throws EmptyCell when trials == 0.
ProbabilityEstimate estimate_probability(std::size_t successes,
                                         std::size_t trials,
                                         double z = kWilsonZ95);

} // namespace knnclust::harness
