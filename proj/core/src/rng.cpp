#include "knnclust/rng.hpp"

#include <cmath>
#include <numbers>

namespace knnclust {

double CounterRng::normal() noexcept
{
  if (has_spare_) {
    has_spare_ = false;
    return spare_;
  }
  const double u1 = uniform_open_low();
  const double u2 = uniform();
  const double radius = std::sqrt(-2.0 * std::log(u1));
  const double angle = 2.0 * std::numbers::pi * u2;
  spare_ = radius * std::sin(angle);
  has_spare_ = true;
  return radius * std::cos(angle);
}

std::uint64_t CounterRng::below(std::uint64_t bound) noexcept
{
  // High word of the 128-bit product x * bound (Lemire's multiply-shift).
  const std::uint64_t x = (*this)();
  const std::uint64_t x_lo = x & 0xFFFFFFFFULL, x_hi = x >> 32;
  const std::uint64_t b_lo = bound & 0xFFFFFFFFULL, b_hi = bound >> 32;
  const std::uint64_t lo_lo = x_lo * b_lo;
  const std::uint64_t hi_lo = x_hi * b_lo;
  const std::uint64_t lo_hi = x_lo * b_hi;
  const std::uint64_t cross = (lo_lo >> 32) + (hi_lo & 0xFFFFFFFFULL) + lo_hi;
  return x_hi * b_hi + (hi_lo >> 32) + (cross >> 32);
}

} // namespace knnclust
