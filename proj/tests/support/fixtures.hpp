#pragma once

#include "knnclust/model.hpp"

#include <numbers>
#include <optional>

namespace fixture {

//! Disks of radius 0.5 at (0,0) and (3,0), mass 0.5 each.
inline knnclust::DensityModel two_disks()
{
  return knnclust::make_ball_mixture(2, { { { 0.0, 0.0 }, 0.5, 0.5 }, { { 3.0, 0.0 }, 0.5, 0.5 } });
}

inline constexpr double two_disk_density = 2.0 / std::numbers::pi;

/// Disks of radius r at (0,0) and (3,0) with mass (1 - bg) / 2 each, inside
/// the box [-1.5, 4.5] x [-1.5, 1.5] carrying mass bg.
inline knnclust::DensityModel two_disks_background(double r, double bg)
{
  const double m = 0.5 * (1.0 - bg);
  knnclust::Background box{ { { -1.5, -1.5 }, { 4.5, 1.5 } }, bg };
  return knnclust::make_ball_mixture(2, { { { 0.0, 0.0 }, r, m }, { { 3.0, 0.0 }, r, m } }, box);
}

inline knnclust::PointCloud line(std::initializer_list<double> xs)
{
  return knnclust::PointCloud(1, std::vector<double>(xs));
}

} // namespace fixture
