#include "knnclust/identify.hpp"

#include "knnclust/error.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>

namespace knnclust {

namespace {

ClusterResult finish(NeighborhoodGraph graph, VertexMask kept, double delta)
{
  const std::size_t n = graph.size();
  ClusterResult result{ std::move(graph), {}, {}, {}, {}, {} };
  result.removed_low_density.assign(n, 0);
  for (std::size_t v = 0; v < n; ++v)
    result.removed_low_density[v] = kept[v] ? 0 : 1;

  const auto pruned = connected_components(result.graph, kept);
  result.survivors = remove_small_components(pruned, delta, n);
  result.removed_small.assign(n, 0);
  for (std::size_t v = 0; v < n; ++v)
    result.removed_small[v] = (kept[v] && !result.survivors[v]) ? 1 : 0;

  result.partition = connected_components(result.graph, result.survivors);
  result.members.assign(result.partition.count(), {});
  for (std::size_t v = 0; v < n; ++v)
    if (result.partition.component[v] >= 0)
      result.members[static_cast<std::size_t>(result.partition.component[v])].push_back(v);
  return result;
}

} // namespace

ClusterResult identify_noisefree(NeighborhoodGraph graph)
{
  VertexMask all(graph.size(), 1);
  return finish(std::move(graph), std::move(all), 0.0);
}

ClusterResult identify_noisefree(const PointCloud& cloud, std::size_t k, Flavor flavor)
{
  if (flavor == Flavor::Epsilon)
    throw Error(ErrorCode::InvalidArgument, "noise-free identification uses a kNN flavor");
  return identify_noisefree(build_graph(cloud, flavor, static_cast<double>(k)));
}

VertexMask prune_low_density(const NeighborhoodGraph& graph,
                             const DensityEstimate& estimate,
                             double t_prime)
{
  if (estimate.values.size() != graph.size())
    throw Error(ErrorCode::MismatchedInputs, "estimate does not cover every vertex");
  VertexMask keep(graph.size());
  for (std::size_t v = 0; v < keep.size(); ++v)
    keep[v] = estimate.values[v] >= t_prime ? 1 : 0;
  return keep;
}

VertexMask remove_small_components(const ComponentPartition& partition,
                                   double delta,
                                   std::size_t n)
{
  if (!(delta >= 0.0) || !(delta < 1.0))
    throw Error(ErrorCode::DomainError, "delta must lie in [0, 1)");
  const double threshold = delta * static_cast<double>(n);
  VertexMask keep(partition.component.size(), 0);
  for (std::size_t v = 0; v < keep.size(); ++v) {
    const auto c = partition.component[v];
    if (c >= 0 && static_cast<double>(partition.sizes[static_cast<std::size_t>(c)]) >= threshold)
      keep[v] = 1;
  }
  return keep;
}

ClusterResult identify_noisy(NeighborhoodGraph graph,
                             const DensityEstimate& estimate,
                             double t_prime,
                             double delta)
{
  auto kept = prune_low_density(graph, estimate, t_prime);
  return finish(std::move(graph), std::move(kept), delta);
}

ClusterResult identify_noisy(const PointCloud& cloud,
                             std::size_t k,
                             Flavor flavor,
                             double t,
                             double eps,
                             double h,
                             double delta)
{
  if (flavor == Flavor::Epsilon)
    throw Error(ErrorCode::InvalidArgument, "noisy identification uses a kNN flavor");
  if (!(eps >= 0.0))
    throw Error(ErrorCode::DomainError, "eps must be nonnegative");
  auto graph = build_graph(cloud, flavor, static_cast<double>(k));
  const auto estimate = kde_at_samples(cloud, h);
  return identify_noisy(std::move(graph), estimate, t - eps, delta);
}

bool IdentificationReport::all_identified() const
{
  return std::all_of(clusters.begin(), clusters.end(),
                     [](const ClusterVerdict& c) { return c.rough_identified; });
}

IdentificationReport assess(const ClusterResult& result,
                            const GroundTruth& truth,
                            const AssessContext& context)
{
  const std::size_t n = result.size();
  if (truth.labels.size() != n || context.cloud.size() != n || context.lists.size() != n ||
      result.graph.size() != n)
    throw Error(ErrorCode::MismatchedInputs, "result, truth, cloud and lists disagree on n");
  if (context.estimate && context.estimate->values.size() != n)
    throw Error(ErrorCode::MismatchedInputs, "estimate does not match the cloud");

  const auto m = static_cast<std::size_t>(truth.m);
  const auto& comp = result.partition.component;
  const double delta_n = context.delta * static_cast<double>(n);
  IdentificationReport report;
  report.clusters.resize(m);

  // Which clusters each final component touches, and whether it holds any.
  std::vector<std::vector<std::uint8_t>> touches(result.partition.count(),
                                                 std::vector<std::uint8_t>(m + 1, 0));
  for (std::size_t v = 0; v < n; ++v) {
    if (comp[v] < 0)
      continue;
    touches[static_cast<std::size_t>(comp[v])][static_cast<std::size_t>(truth.labels[v])] = 1;
    if (truth.labels[v] > 0)
      ++report.n_cluster;
    else
      ++report.n_no_cluster;
  }
  if (report.n_cluster > 0)
    report.ratio = static_cast<double>(report.n_no_cluster) / static_cast<double>(report.n_cluster);
  else
    report.ratio = report.n_no_cluster > 0 ? std::numeric_limits<double>::infinity() : 0.0;

  for (const auto& t : touches)
    if (std::none_of(t.begin() + 1, t.end(), [](std::uint8_t b) { return b != 0; }))
      report.no_background_only_component = false;

  VertexMask kept(n);
  for (std::size_t v = 0; v < n; ++v)
    kept[v] = result.removed_low_density[v] ? 0 : 1;

  for (std::size_t i = 1; i <= m; ++i) {
    ClusterVerdict& verdict = report.clusters[i - 1];
    std::vector<std::size_t> samples;
    for (std::size_t v = 0; v < n; ++v)
      if (truth.labels[v] == static_cast<int>(i))
        samples.push_back(v);
    verdict.sample_count = samples.size();
    verdict.event_b = static_cast<double>(samples.size()) > delta_n;

    if (!samples.empty()) {
      const auto radii = knn_radii(context.lists, samples);
      verdict.r_min = radii.min;
      verdict.r_tilde_max = radii.max;
    }

    // A: cluster samples all survive pruning and their induced subgraph in
    // the pruned graph is connected.
    bool all_kept = std::all_of(samples.begin(), samples.end(),
                                [&](std::size_t v) { return kept[v] != 0; });
    if (all_kept) {
      VertexMask only(n, 0);
      for (std::size_t v : samples)
        only[v] = 1;
      verdict.event_a = connected_components(result.graph, only).count() <= 1;
    }

    // Rough identification and event C.
    bool all_survive = std::all_of(samples.begin(), samples.end(),
                                   [&](std::size_t v) { return comp[v] >= 0; });
    bool one_component = all_survive;
    if (all_survive && !samples.empty()) {
      const auto c = comp[samples.front()];
      one_component = std::all_of(samples.begin(), samples.end(),
                                  [&](std::size_t v) { return comp[v] == c; });
      if (one_component)
        verdict.component = static_cast<std::size_t>(c);
    }
    verdict.connected_in_result = all_survive && one_component;
    bool exclusive = true;
    if (verdict.component) {
      const auto& t = touches[*verdict.component];
      for (std::size_t j = 1; j <= m; ++j)
        if (j != i && t[j])
          exclusive = false;
    }
    verdict.rough_identified = verdict.connected_in_result && exclusive;

    // I: no surviving edge from a cluster-i sample to another cluster.
    verdict.event_i = true;
    for (std::size_t v : samples) {
      if (comp[v] < 0)
        continue;
      for (std::uint32_t w : result.graph.neighbors(v)) {
        const int lw = truth.labels[w];
        if (comp[w] >= 0 && lw > 0 && lw != static_cast<int>(i)) {
          verdict.event_i = false;
          break;
        }
      }
      if (!verdict.event_i)
        break;
    }
  }

  if (context.estimate) {
    for (std::size_t v = 0; v < n; ++v) {
      const double dev =
        std::abs(context.estimate->values[v] - density_at(context.model, context.cloud[v]));
      report.sup_error = std::max(report.sup_error, dev);
      if (in_boundary_strip(context.model, truth.level, context.eps, context.cloud[v]))
        ++report.strip_count;
    }
    report.event_d = report.sup_error <= context.eps;
    report.event_e = static_cast<double>(report.strip_count) < delta_n;
  }
  return report;
}

void write_label_file(std::ostream& os, const ClusterResult& result)
{
  for (std::size_t v = 0; v < result.size(); ++v)
    os << v << ' ' << result.partition.component[v] << '\n';
}

} // namespace knnclust
