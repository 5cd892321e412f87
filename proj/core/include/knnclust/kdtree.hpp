#pragma once

#include "knnclust/model.hpp"

#include <cstddef>
#include <cstdint>
#include <vector>

namespace knnclust {

struct Neighbor
{
  std::uint32_t index = 0;
  double distance = 0.0;
};

//! Squared Euclidean distance accumulated in coordinate order.
inline double squared_distance(const double* a, const double* b, std::size_t d)
{
  double s = 0.0;
  for (std::size_t j = 0; j < d; ++j) {
    const double diff = a[j] - b[j];
    s += diff * diff;
  }
  return s;
}

/// Static kd-tree over a PointCloud answering exact k-nearest-neighbor
/// queries. Results are ordered by (squared distance, index), identical to
/// a brute-force scan that uses the same distance accumulation.
class KdTree
{
public:
  explicit KdTree(const PointCloud& cloud, std::size_t leaf_size = 16);

  //! k nearest points to cloud[query], excluding the query itself.
  std::vector<Neighbor> knn(std::size_t query, std::size_t k) const;

private:
  struct Node
  {
    std::uint32_t begin = 0;
    std::uint32_t end = 0;
    std::int32_t left = -1;
    std::int32_t right = -1;
    std::uint32_t axis = 0;
    double split = 0.0;
  };

  std::int32_t build(std::uint32_t begin, std::uint32_t end);

  const PointCloud& cloud_;
  std::size_t leaf_size_;
  std::vector<std::uint32_t> order_;
  std::vector<Node> nodes_;
  std::vector<double> bbox_lo_;
  std::vector<double> bbox_hi_;
};

} // namespace knnclust
