#pragma once

#include "knnclust/kdtree.hpp"
#include "knnclust/model.hpp"

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <memory>
#include <span>
#include <string_view>
#include <utility>
#include <vector>

namespace knnclust {

enum class Flavor
{
  Mutual,
  Symmetric,
  Epsilon
};

std::string_view to_string(Flavor flavor) noexcept;
Flavor parse_flavor(std::string_view text);

//! One byte per vertex; nonzero means active.
using VertexMask = std::vector<std::uint8_t>;

/// Per-point k nearest other points, ordered by distance with ties broken
/// toward the smaller point index.
class NeighborLists
{
public:
  NeighborLists(std::size_t n, std::size_t k, std::vector<Neighbor> entries);

  std::size_t size() const { return n_; }
  std::size_t k() const { return k_; }
  std::span<const Neighbor> operator[](std::size_t i) const
  {
    return { entries_->data() + i * stride_, k_ };
  }
  //! Distance to the k-th neighbor.
  double radius(std::size_t i) const { return (*entries_)[i * stride_ + k_ - 1].distance; }

  /// Lists of the first k' <= k neighbors, valid because rows are sorted.
  /// Shares storage with this object.
  NeighborLists truncated(std::size_t k) const;

private:
  NeighborLists() = default;

  std::size_t n_ = 0;
  std::size_t k_ = 0;
  std::size_t stride_ = 0;
  std::shared_ptr<const std::vector<Neighbor>> entries_;
};

enum class KnnBackend
{
  Auto,
  BruteForce,
  KdTree
};

//! Below this many points Auto uses the brute-force scan.
inline constexpr std::size_t kBruteForceLimit = 2000;

NeighborLists knn_sets(const PointCloud& cloud,
                       std::size_t k,
                       KnnBackend backend = KnnBackend::Auto);

//! Undirected simple graph in compressed sparse row form.
class NeighborhoodGraph
{
public:
  NeighborhoodGraph(std::size_t n,
                    std::vector<std::pair<std::uint32_t, std::uint32_t>> edges,
                    Flavor flavor,
                    double parameter);

  std::size_t size() const { return offsets_.size() - 1; }
  std::span<const std::uint32_t> neighbors(std::size_t v) const
  {
    return { adjacency_.data() + offsets_[v], offsets_[v + 1] - offsets_[v] };
  }
  std::size_t edge_count() const { return adjacency_.size() / 2; }
  bool has_edge(std::size_t a, std::size_t b) const;
  //! All edges as (i, j) with i < j, lexicographically sorted.
  std::vector<std::pair<std::uint32_t, std::uint32_t>> edges() const;

  Flavor flavor() const { return flavor_; }
  double parameter() const { return parameter_; }

private:
  std::vector<std::size_t> offsets_;
  std::vector<std::uint32_t> adjacency_;
  Flavor flavor_;
  double parameter_;
};

//! Mutual or symmetric kNN graph from precomputed lists.
NeighborhoodGraph build_knn_graph(const NeighborLists& lists, Flavor flavor);

NeighborhoodGraph build_epsilon_graph(const PointCloud& cloud, double eps);

//! parameter is k for the kNN flavors and the radius for Epsilon.
NeighborhoodGraph build_graph(const PointCloud& cloud, Flavor flavor, double parameter);

struct ComponentPartition
{
  //! Component id per vertex, -1 for inactive vertices.
  std::vector<std::int32_t> component;
  std::vector<std::size_t> sizes;

  std::size_t count() const { return sizes.size(); }
};

/// Connected components over the active vertices (all when mask is empty),
/// found by iterative depth-first search. Components are numbered in order
/// of their smallest vertex.
ComponentPartition connected_components(const NeighborhoodGraph& graph,
                                        const VertexMask& active = {});

//! Same partition computed with a disjoint-set forest.
ComponentPartition connected_components_union_find(const NeighborhoodGraph& graph,
                                                   const VertexMask& active = {});

struct RadiusRange
{
  double min = 0.0;
  double max = 0.0;
};

//! Min and max k-th neighbor distance over the given vertices.
RadiusRange knn_radii(const NeighborLists& lists, std::span<const std::size_t> subset);

//! "i j" per line with i < j.
void write_edge_list(std::ostream& os, const NeighborhoodGraph& graph);

} // namespace knnclust
