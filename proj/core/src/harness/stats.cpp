#include "knnclust/harness/stats.hpp"

#include "knnclust/error.hpp"

#include <algorithm>
#include <cmath>

namespace knnclust::harness {

ProbabilityEstimate estimate_probability(std::size_t successes, std::size_t trials, double z)
{
  if (trials == 0)
    throw Error(ErrorCode::EmptyCell, "no records in cell");
  if (successes > trials)
    throw Error(ErrorCode::InvalidArgument, "more successes than trials");
  ProbabilityEstimate est;
  est.successes = successes;
  est.trials = trials;
  const double n = static_cast<double>(trials);
  const double p = static_cast<double>(successes) / n;
  const double z2 = z * z;
  const double denom = 1.0 + z2 / n;
  const double center = (p + z2 / (2.0 * n)) / denom;
  const double half = z / denom * std::sqrt(p * (1.0 - p) / n + z2 / (4.0 * n * n));
  est.p_hat = p;
  est.lower = std::max(0.0, center - half);
  est.upper = std::min(1.0, center + half);
  // Pin the endpoints that are exact in real arithmetic.
  if (successes == 0)
    est.lower = 0.0;
  if (successes == trials)
    est.upper = 1.0;
  return est;
}

} // namespace knnclust::harness
