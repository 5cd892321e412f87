#pragma once

#include "knnclust/model.hpp"

#include <cstddef>
#include <span>
#include <string_view>
#include <vector>

namespace knnclust {

enum class Kernel
{
  Gaussian
};

std::string_view to_string(Kernel kernel) noexcept;

//! Normalising constant c_d with K(u) = c_d * profile(|u|^2).
double kernel_constant(Kernel kernel, std::size_t d);
double kernel_profile(Kernel kernel, double norm2);

inline double kernel_value(Kernel kernel, std::size_t d, double norm2)
{
  return kernel_constant(kernel, d) * kernel_profile(kernel, norm2);
}

struct DensityEstimate
{
  std::vector<double> values;
  double bandwidth = 0.0;
  Kernel kernel = Kernel::Gaussian;
};

/// p_hat(X_i) = 1/(n h^d) sum_j K((X_i - X_j)/h), self term included.
DensityEstimate kde_at_samples(const PointCloud& cloud,
                               double h,
                               Kernel kernel = Kernel::Gaussian);

//! The same estimator evaluated at an arbitrary location.
double kde_evaluate(const PointCloud& cloud,
                    double h,
                    std::span<const double> x,
                    Kernel kernel = Kernel::Gaussian);

struct SupError
{
  //! max |p_hat - p| over all samples
  double all = 0.0;
  /// Same maximum restricted to samples at least interior_margin from every
  /// discontinuity of the density; 0 when no sample qualifies.
  double interior = 0.0;
  std::size_t interior_count = 0;
};

//! Default interior margin, in bandwidths.
inline constexpr double kInteriorMarginBandwidths = 3.0;

SupError sup_error(const DensityModel& model,
                   const PointCloud& cloud,
                   const DensityEstimate& estimate,
                   double interior_margin_bandwidths = kInteriorMarginBandwidths);

struct BandwidthSchedule
{
  double h = 0.0;
  double eps = 0.0;
};

/// h_n = h0 (log n / n)^(1/(d+4)),  eps_n = eps0 (log n / n)^(2/(d+4)).
BandwidthSchedule exact_id_schedule(double n, int d, double h0, double eps0);

} // namespace knnclust
