#pragma once

#include <cstdint>
#include <limits>

namespace knnclust {

//! SplitMix64 finalizer (Stafford variant 13).
constexpr std::uint64_t mix64(std::uint64_t z) noexcept
{
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

//! Order-dependent combination of two 64-bit values.
constexpr std::uint64_t hash_combine(std::uint64_t a, std::uint64_t b) noexcept
{
  return mix64(a ^ mix64(b + 0x9E3779B97F4A7C15ULL));
}

/// Counter-based generator: the i-th output (i = 1, 2, ...) is
/// mix64(seed + i * 0x9E3779B97F4A7C15), i.e. SplitMix64 evaluated in
/// counter mode. Doubles take the top 53 bits; normals use the
/// Box-Muller transform on two consecutive uniforms, returning the cosine
/// branch first and the sine branch on the next call.
class CounterRng
{
public:
  using result_type = std::uint64_t;

  explicit CounterRng(std::uint64_t seed) noexcept : seed_(seed) {}

  static constexpr result_type min() noexcept { return 0; }
  static constexpr result_type max() noexcept
  {
    return std::numeric_limits<result_type>::max();
  }

  result_type operator()() noexcept
  {
    ++counter_;
    return mix64(seed_ + counter_ * 0x9E3779B97F4A7C15ULL);
  }

  //! Uniform in [0, 1).
  double uniform() noexcept
  {
    return static_cast<double>((*this)() >> 11) * 0x1.0p-53;
  }

  //! Uniform in (0, 1].
  double uniform_open_low() noexcept { return 1.0 - uniform(); }

  double normal() noexcept;

  //! Index in [0, bound) by Lemire's multiply-shift (bias < 2^-64 * bound).
  std::uint64_t below(std::uint64_t bound) noexcept;

  std::uint64_t seed() const noexcept { return seed_; }
  std::uint64_t counter() const noexcept { return counter_; }

private:
  std::uint64_t seed_;
  std::uint64_t counter_ = 0;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

} // namespace knnclust
