#include "knnclust/kdtree.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <queue>

namespace knnclust {

namespace {

struct Candidate
{
  double dist2;
  std::uint32_t index;
  bool operator<(const Candidate& o) const
  {
    return dist2 < o.dist2 || (dist2 == o.dist2 && index < o.index);
  }
};

} // namespace

KdTree::KdTree(const PointCloud& cloud, std::size_t leaf_size)
  : cloud_(cloud)
  , leaf_size_(std::max<std::size_t>(leaf_size, 1))
  , order_(cloud.size())
{
  std::iota(order_.begin(), order_.end(), 0u);
  nodes_.reserve(2 * cloud.size() / leaf_size_ + 1);
  build(0, static_cast<std::uint32_t>(cloud.size()));
}

std::int32_t KdTree::build(std::uint32_t begin, std::uint32_t end)
{
  const std::size_t d = cloud_.dimension();
  const auto id = static_cast<std::int32_t>(nodes_.size());
  nodes_.push_back(Node{ begin, end });
  bbox_lo_.resize(nodes_.size() * d);
  bbox_hi_.resize(nodes_.size() * d);
  double* lo = bbox_lo_.data() + id * d;
  double* hi = bbox_hi_.data() + id * d;
  for (std::size_t j = 0; j < d; ++j) {
    lo[j] = std::numeric_limits<double>::infinity();
    hi[j] = -std::numeric_limits<double>::infinity();
  }
  for (std::uint32_t p = begin; p < end; ++p) {
    auto x = cloud_[order_[p]];
    for (std::size_t j = 0; j < d; ++j) {
      lo[j] = std::min(lo[j], x[j]);
      hi[j] = std::max(hi[j], x[j]);
    }
  }
  if (end - begin <= leaf_size_)
    return id;

  std::uint32_t axis = 0;
  double widest = -1.0;
  for (std::size_t j = 0; j < d; ++j) {
    if (hi[j] - lo[j] > widest) {
      widest = hi[j] - lo[j];
      axis = static_cast<std::uint32_t>(j);
    }
  }
  if (widest <= 0.0)
    return id;

  const std::uint32_t mid = begin + (end - begin) / 2;
  std::nth_element(order_.begin() + begin, order_.begin() + mid, order_.begin() + end,
                   [&](std::uint32_t a, std::uint32_t b) {
                     return cloud_[a][axis] < cloud_[b][axis];
                   });
  const double split = cloud_[order_[mid]][axis];
  const std::int32_t left = build(begin, mid);
  const std::int32_t right = build(mid, end);
  nodes_[id].axis = axis;
  nodes_[id].split = split;
  nodes_[id].left = left;
  nodes_[id].right = right;
  return id;
}

std::vector<Neighbor> KdTree::knn(std::size_t query, std::size_t k) const
{
  const std::size_t d = cloud_.dimension();
  const double* q = cloud_[query].data();
  std::priority_queue<Candidate> heap;

  // Lower bound on the squared distance from q to a node's bounding box.
  auto box_bound = [&](std::int32_t node) {
    const double* lo = bbox_lo_.data() + node * d;
    const double* hi = bbox_hi_.data() + node * d;
    double s = 0.0;
    for (std::size_t j = 0; j < d; ++j) {
      double gap = 0.0;
      if (q[j] < lo[j])
        gap = lo[j] - q[j];
      else if (q[j] > hi[j])
        gap = q[j] - hi[j];
      s += gap * gap;
    }
    return s;
  };
  // A node can only be skipped when it is strictly farther than the current
  // k-th candidate; equal distances may still win on the index tie-break.
  // The slack absorbs rounding differences between the box bound and the
  // coordinate-wise distance sum.
  auto prunable = [&](double bound) {
    return heap.size() == k && bound > heap.top().dist2 * (1.0 + 1e-12) + 1e-300;
  };

  std::vector<std::pair<std::int32_t, double>> stack;
  stack.emplace_back(0, box_bound(0));
  while (!stack.empty()) {
    auto [node_id, bound] = stack.back();
    stack.pop_back();
    if (prunable(bound))
      continue;
    const Node& node = nodes_[node_id];
    if (node.left < 0) {
      for (std::uint32_t p = node.begin; p < node.end; ++p) {
        const std::uint32_t idx = order_[p];
        if (idx == query)
          continue;
        Candidate c{ squared_distance(q, cloud_[idx].data(), d), idx };
        if (heap.size() < k) {
          heap.push(c);
        } else if (c < heap.top()) {
          heap.pop();
          heap.push(c);
        }
      }
      continue;
    }
    const double bl = box_bound(node.left);
    const double br = box_bound(node.right);
    // Push the farther child first so the nearer one is explored next.
    if (bl <= br) {
      stack.emplace_back(node.right, br);
      stack.emplace_back(node.left, bl);
    } else {
      stack.emplace_back(node.left, bl);
      stack.emplace_back(node.right, br);
    }
  }

  std::vector<Neighbor> out(heap.size());
  for (std::size_t i = out.size(); i-- > 0;) {
    out[i] = Neighbor{ heap.top().index, std::sqrt(heap.top().dist2) };
    heap.pop();
  }
  return out;
}

} // namespace knnclust
