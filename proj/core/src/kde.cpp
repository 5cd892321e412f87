#include "knnclust/kde.hpp"

#include "knnclust/error.hpp"
#include "knnclust/kdtree.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace knnclust {

std::string_view to_string(Kernel kernel) noexcept
{
  switch (kernel) {
    case Kernel::Gaussian: return "gaussian";
  }
  return "unknown";
}

double kernel_constant(Kernel kernel, std::size_t d)
{
  switch (kernel) {
    case Kernel::Gaussian:
      return std::pow(2.0 * std::numbers::pi, -0.5 * static_cast<double>(d));
  }
  return 0.0;
}

double kernel_profile(Kernel kernel, double norm2)
{
  switch (kernel) {
    case Kernel::Gaussian: return std::exp(-0.5 * norm2);
  }
  return 0.0;
}

DensityEstimate kde_at_samples(const PointCloud& cloud, double h, Kernel kernel)
{
  if (!(h > 0.0) || !std::isfinite(h))
    throw Error(ErrorCode::NonpositiveBandwidth, "bandwidth must be positive");
  const std::size_t n = cloud.size();
  const std::size_t d = cloud.dimension();
  const double inv_h2 = 1.0 / (h * h);
  const double self = kernel_profile(kernel, 0.0);

  // Pairwise terms are symmetric; accumulate each once.
  std::vector<double> sums(n, self);
  for (std::size_t i = 0; i < n; ++i) {
    const double* xi = cloud[i].data();
    for (std::size_t j = i + 1; j < n; ++j) {
      const double kv =
        kernel_profile(kernel, squared_distance(xi, cloud[j].data(), d) * inv_h2);
      sums[i] += kv;
      sums[j] += kv;
    }
  }
  const double norm = kernel_constant(kernel, d) /
                      (static_cast<double>(n) * std::pow(h, static_cast<double>(d)));
  DensityEstimate est;
  est.bandwidth = h;
  est.kernel = kernel;
  est.values.resize(n);
  std::transform(sums.begin(), sums.end(), est.values.begin(),
                 [norm](double s) { return s * norm; });
  return est;
}

double kde_evaluate(const PointCloud& cloud, double h, std::span<const double> x, Kernel kernel)
{
  if (!(h > 0.0) || !std::isfinite(h))
    throw Error(ErrorCode::NonpositiveBandwidth, "bandwidth must be positive");
  const std::size_t d = cloud.dimension();
  if (x.size() != d)
    throw Error(ErrorCode::DimensionMismatch, "evaluation point has wrong dimension");
  const double inv_h2 = 1.0 / (h * h);
  double sum = 0.0;
  for (std::size_t j = 0; j < cloud.size(); ++j)
    sum += kernel_profile(kernel, squared_distance(x.data(), cloud[j].data(), d) * inv_h2);
  return kernel_constant(kernel, d) * sum /
         (static_cast<double>(cloud.size()) * std::pow(h, static_cast<double>(d)));
}

SupError sup_error(const DensityModel& model,
                   const PointCloud& cloud,
                   const DensityEstimate& estimate,
                   double interior_margin_bandwidths)
{
  if (estimate.values.size() != cloud.size())
    throw Error(ErrorCode::MismatchedInputs, "estimate does not match the cloud");
  const double margin = interior_margin_bandwidths * estimate.bandwidth;
  SupError err;
  for (std::size_t i = 0; i < cloud.size(); ++i) {
    const double dev = std::abs(estimate.values[i] - density_at(model, cloud[i]));
    err.all = std::max(err.all, dev);
    if (distance_to_support_boundary(model, cloud[i]) >= margin) {
      err.interior = std::max(err.interior, dev);
      ++err.interior_count;
    }
  }
  return err;
}

BandwidthSchedule exact_id_schedule(double n, int d, double h0, double eps0)
{
  if (!(n >= 2.0))
    throw Error(ErrorCode::DomainError, "schedule needs n >= 2");
  if (d < 1)
    throw Error(ErrorCode::DomainError, "dimension must be positive");
  if (!(h0 > 0.0) || !(eps0 > 0.0))
    throw Error(ErrorCode::DomainError, "schedule scales must be positive");
  const double base = std::log(n) / n;
  const double e = 1.0 / (d + 4.0);
  return { h0 * std::pow(base, e), eps0 * std::pow(base, 2.0 * e) };
}

} // namespace knnclust
