#include "knnclust/graph.hpp"

#include "knnclust/error.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <ostream>
#include <string>

namespace knnclust {

std::string_view to_string(Flavor flavor) noexcept
{
  switch (flavor) {
    case Flavor::Mutual: return "mutual";
    case Flavor::Symmetric: return "symmetric";
    case Flavor::Epsilon: return "epsilon";
  }
  return "unknown";
}

Flavor parse_flavor(std::string_view text)
{
  if (text == "mutual")
    return Flavor::Mutual;
  if (text == "symmetric")
    return Flavor::Symmetric;
  if (text == "epsilon")
    return Flavor::Epsilon;
  throw Error(ErrorCode::InvalidArgument, "unknown graph flavor '" + std::string(text) + "'");
}

NeighborLists::NeighborLists(std::size_t n, std::size_t k, std::vector<Neighbor> entries)
  : n_(n)
  , k_(k)
  , stride_(k)
{
  if (entries.size() != n_ * k_)
    throw Error(ErrorCode::MismatchedInputs, "neighbor table has wrong size");
  entries_ = std::make_shared<const std::vector<Neighbor>>(std::move(entries));
}

NeighborLists NeighborLists::truncated(std::size_t k) const
{
  if (k < 1 || k > k_)
    throw Error(ErrorCode::KOutOfRange, "cannot truncate to k=" + std::to_string(k));
  NeighborLists out = *this;
  out.k_ = k;
  return out;
}

namespace {

void check_k(std::size_t n, std::size_t k)
{
  if (k < 1 || n < 2 || k > n - 1)
    throw Error(ErrorCode::KOutOfRange,
                "k=" + std::to_string(k) + " outside [1, " +
                  std::to_string(n > 0 ? n - 1 : 0) + "]");
}

std::vector<Neighbor> brute_force_row(const PointCloud& cloud,
                                      std::size_t query,
                                      std::size_t k,
                                      std::vector<std::pair<double, std::uint32_t>>& scratch)
{
  const std::size_t n = cloud.size();
  const std::size_t d = cloud.dimension();
  const double* q = cloud[query].data();
  scratch.clear();
  for (std::size_t j = 0; j < n; ++j) {
    if (j == query)
      continue;
    scratch.emplace_back(squared_distance(q, cloud[j].data(), d),
                         static_cast<std::uint32_t>(j));
  }
  std::partial_sort(scratch.begin(), scratch.begin() + static_cast<std::ptrdiff_t>(k),
                    scratch.end());
  std::vector<Neighbor> row(k);
  for (std::size_t r = 0; r < k; ++r)
    row[r] = Neighbor{ scratch[r].second, std::sqrt(scratch[r].first) };
  return row;
}

} // namespace

NeighborLists knn_sets(const PointCloud& cloud, std::size_t k, KnnBackend backend)
{
  const std::size_t n = cloud.size();
  check_k(n, k);
  if (backend == KnnBackend::Auto)
    backend = n < kBruteForceLimit ? KnnBackend::BruteForce : KnnBackend::KdTree;

  std::vector<Neighbor> entries;
  entries.reserve(n * k);
  if (backend == KnnBackend::BruteForce) {
    std::vector<std::pair<double, std::uint32_t>> scratch;
    scratch.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
      auto row = brute_force_row(cloud, i, k, scratch);
      entries.insert(entries.end(), row.begin(), row.end());
    }
  } else {
    const KdTree tree(cloud);
    for (std::size_t i = 0; i < n; ++i) {
      auto row = tree.knn(i, k);
      entries.insert(entries.end(), row.begin(), row.end());
    }
  }
  return NeighborLists(n, k, std::move(entries));
}

NeighborhoodGraph::NeighborhoodGraph(
  std::size_t n,
  std::vector<std::pair<std::uint32_t, std::uint32_t>> edges,
  Flavor flavor,
  double parameter)
  : offsets_(n + 1, 0)
  , flavor_(flavor)
  , parameter_(parameter)
{
  for (auto& [a, b] : edges) {
    if (a >= n || b >= n)
      throw Error(ErrorCode::InvalidArgument, "edge endpoint out of range");
    if (a > b)
      std::swap(a, b);
  }
  std::sort(edges.begin(), edges.end());
  edges.erase(std::unique(edges.begin(), edges.end()), edges.end());
  std::erase_if(edges, [](const auto& e) { return e.first == e.second; });

  for (const auto& [a, b] : edges) {
    ++offsets_[a + 1];
    ++offsets_[b + 1];
  }
  std::partial_sum(offsets_.begin(), offsets_.end(), offsets_.begin());
  adjacency_.resize(offsets_.back());
  std::vector<std::size_t> cursor(offsets_.begin(), offsets_.end() - 1);
  for (const auto& [a, b] : edges) {
    adjacency_[cursor[a]++] = b;
    adjacency_[cursor[b]++] = a;
  }
  for (std::size_t v = 0; v < n; ++v)
    std::sort(adjacency_.begin() + static_cast<std::ptrdiff_t>(offsets_[v]),
              adjacency_.begin() + static_cast<std::ptrdiff_t>(offsets_[v + 1]));
}

bool NeighborhoodGraph::has_edge(std::size_t a, std::size_t b) const
{
  auto row = neighbors(a);
  return std::binary_search(row.begin(), row.end(), static_cast<std::uint32_t>(b));
}

std::vector<std::pair<std::uint32_t, std::uint32_t>> NeighborhoodGraph::edges() const
{
  std::vector<std::pair<std::uint32_t, std::uint32_t>> out;
  out.reserve(edge_count());
  for (std::size_t v = 0; v < size(); ++v)
    for (std::uint32_t w : neighbors(v))
      if (v < w)
        out.emplace_back(static_cast<std::uint32_t>(v), w);
  return out;
}

NeighborhoodGraph build_knn_graph(const NeighborLists& lists, Flavor flavor)
{
  if (flavor == Flavor::Epsilon)
    throw Error(ErrorCode::InvalidArgument, "epsilon graphs are not built from kNN lists");
  const std::size_t n = lists.size();
  const std::size_t k = lists.k();

  std::vector<std::pair<std::uint32_t, std::uint32_t>> edges;
  if (flavor == Flavor::Symmetric) {
    edges.reserve(n * k);
    for (std::size_t i = 0; i < n; ++i)
      for (const auto& nb : lists[i])
        edges.emplace_back(static_cast<std::uint32_t>(i), nb.index);
    return NeighborhoodGraph(n, std::move(edges), flavor, static_cast<double>(k));
  }

  // Mutual: keep i -> j only if j -> i; sorted rows allow binary search.
  std::vector<std::uint32_t> sorted(n * k);
  for (std::size_t i = 0; i < n; ++i) {
    auto row = lists[i];
    auto out = sorted.begin() + static_cast<std::ptrdiff_t>(i * k);
    std::transform(row.begin(), row.end(), out, [](const Neighbor& nb) { return nb.index; });
    std::sort(out, out + static_cast<std::ptrdiff_t>(k));
  }
  for (std::size_t i = 0; i < n; ++i) {
    for (const auto& nb : lists[i]) {
      const std::uint32_t j = nb.index;
      if (j < i)
        continue;
      auto back = sorted.begin() + static_cast<std::ptrdiff_t>(j * k);
      if (std::binary_search(back, back + static_cast<std::ptrdiff_t>(k),
                             static_cast<std::uint32_t>(i)))
        edges.emplace_back(static_cast<std::uint32_t>(i), j);
    }
  }
  return NeighborhoodGraph(n, std::move(edges), flavor, static_cast<double>(k));
}

NeighborhoodGraph build_epsilon_graph(const PointCloud& cloud, double eps)
{
  if (!(eps >= 0.0))
    throw Error(ErrorCode::NegativeEpsilon, "epsilon must be nonnegative");
  const std::size_t n = cloud.size();
  const std::size_t d = cloud.dimension();
  std::vector<std::pair<std::uint32_t, std::uint32_t>> edges;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j)
      if (std::sqrt(squared_distance(cloud[i].data(), cloud[j].data(), d)) <= eps)
        edges.emplace_back(static_cast<std::uint32_t>(i), static_cast<std::uint32_t>(j));
  return NeighborhoodGraph(n, std::move(edges), Flavor::Epsilon, eps);
}

NeighborhoodGraph build_graph(const PointCloud& cloud, Flavor flavor, double parameter)
{
  if (flavor == Flavor::Epsilon)
    return build_epsilon_graph(cloud, parameter);
  if (!(parameter >= 1.0) || parameter != std::floor(parameter))
    throw Error(ErrorCode::KOutOfRange, "k must be a positive integer");
  const auto k = static_cast<std::size_t>(parameter);
  return build_knn_graph(knn_sets(cloud, k), flavor);
}

namespace {

bool is_active(const VertexMask& mask, std::size_t v)
{
  return mask.empty() || mask[v] != 0;
}

void check_mask(const NeighborhoodGraph& graph, const VertexMask& mask)
{
  if (!mask.empty() && mask.size() != graph.size())
    throw Error(ErrorCode::MismatchedInputs, "vertex mask length differs from graph size");
}

} // namespace

ComponentPartition connected_components(const NeighborhoodGraph& graph,
                                        const VertexMask& active)
{
  check_mask(graph, active);
  const std::size_t n = graph.size();
  ComponentPartition part;
  part.component.assign(n, -1);
  std::vector<std::uint32_t> stack;
  for (std::size_t root = 0; root < n; ++root) {
    if (!is_active(active, root) || part.component[root] >= 0)
      continue;
    const auto id = static_cast<std::int32_t>(part.sizes.size());
    std::size_t size = 0;
    part.component[root] = id;
    stack.push_back(static_cast<std::uint32_t>(root));
    while (!stack.empty()) {
      const std::uint32_t v = stack.back();
      stack.pop_back();
      ++size;
      for (std::uint32_t w : graph.neighbors(v)) {
        if (is_active(active, w) && part.component[w] < 0) {
          part.component[w] = id;
          stack.push_back(w);
        }
      }
    }
    part.sizes.push_back(size);
  }
  return part;
}

namespace {

class DisjointSet
{
public:
  explicit DisjointSet(std::size_t n) : parent_(n), rank_(n, 0)
  {
    std::iota(parent_.begin(), parent_.end(), 0u);
  }

  std::uint32_t find(std::uint32_t x)
  {
    while (parent_[x] != x) {
      parent_[x] = parent_[parent_[x]];
      x = parent_[x];
    }
    return x;
  }

  void unite(std::uint32_t a, std::uint32_t b)
  {
    a = find(a);
    b = find(b);
    if (a == b)
      return;
    if (rank_[a] < rank_[b])
      std::swap(a, b);
    parent_[b] = a;
    if (rank_[a] == rank_[b])
      ++rank_[a];
  }

private:
  std::vector<std::uint32_t> parent_;
  std::vector<std::uint8_t> rank_;
};

} // namespace

ComponentPartition connected_components_union_find(const NeighborhoodGraph& graph,
                                                   const VertexMask& active)
{
  check_mask(graph, active);
  const std::size_t n = graph.size();
  DisjointSet sets(n);
  for (std::size_t v = 0; v < n; ++v) {
    if (!is_active(active, v))
      continue;
    for (std::uint32_t w : graph.neighbors(v))
      if (w > v && is_active(active, w))
        sets.unite(static_cast<std::uint32_t>(v), w);
  }
  ComponentPartition part;
  part.component.assign(n, -1);
  std::vector<std::int32_t> root_id(n, -1);
  for (std::size_t v = 0; v < n; ++v) {
    if (!is_active(active, v))
      continue;
    const std::uint32_t r = sets.find(static_cast<std::uint32_t>(v));
    if (root_id[r] < 0) {
      root_id[r] = static_cast<std::int32_t>(part.sizes.size());
      part.sizes.push_back(0);
    }
    part.component[v] = root_id[r];
    ++part.sizes[static_cast<std::size_t>(root_id[r])];
  }
  return part;
}

RadiusRange knn_radii(const NeighborLists& lists, std::span<const std::size_t> subset)
{
  if (subset.empty())
    throw Error(ErrorCode::EmptySubset, "radius statistics need at least one vertex");
  RadiusRange range{ std::numeric_limits<double>::infinity(), 0.0 };
  for (std::size_t v : subset) {
    if (v >= lists.size())
      throw Error(ErrorCode::InvalidArgument, "vertex index out of range");
    const double r = lists.radius(v);
    range.min = std::min(range.min, r);
    range.max = std::max(range.max, r);
  }
  return range;
}

void write_edge_list(std::ostream& os, const NeighborhoodGraph& graph)
{
  for (const auto& [a, b] : graph.edges())
    os << a << ' ' << b << '\n';
}

} // namespace knnclust
