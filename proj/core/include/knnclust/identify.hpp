#pragma once

#include "knnclust/graph.hpp"
#include "knnclust/kde.hpp"
#include "knnclust/model.hpp"

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <vector>

namespace knnclust {

/// Output of either clustering pipeline. Every vertex is in exactly one of
/// survivors / removed_low_density / removed_small.
struct ClusterResult
{
  NeighborhoodGraph graph;
  VertexMask survivors;
  VertexMask removed_low_density;
  VertexMask removed_small;
  //! Components of the surviving subgraph (-1 for removed vertices).
  ComponentPartition partition;
  std::vector<std::vector<std::size_t>> members;

  std::size_t size() const { return survivors.size(); }
};

//! Components of the kNN graph of the given flavor; nothing is removed.
ClusterResult identify_noisefree(const PointCloud& cloud, std::size_t k, Flavor flavor);
ClusterResult identify_noisefree(NeighborhoodGraph graph);

//! Keeps exactly the vertices with p_hat >= t_prime.
VertexMask prune_low_density(const NeighborhoodGraph& graph,
                             const DensityEstimate& estimate,
                             double t_prime);

//! Keeps vertices of components with at least delta * n members.
VertexMask remove_small_components(const ComponentPartition& partition,
                                   double delta,
                                   std::size_t n);

/// Noisy-case pipeline: kNN graph, kernel density estimate, removal of
/// points with p_hat < t - eps, connected components, removal of components
/// smaller than delta * n.
ClusterResult identify_noisy(const PointCloud& cloud,
                             std::size_t k,
                             Flavor flavor,
                             double t,
                             double eps,
                             double h,
                             double delta);

//! Same pipeline on a prebuilt graph and estimate.
ClusterResult identify_noisy(NeighborhoodGraph graph,
                             const DensityEstimate& estimate,
                             double t_prime,
                             double delta);

struct ClusterVerdict
{
  std::size_t sample_count = 0;
  bool rough_identified = false;
  std::optional<std::size_t> component;
  //! Cluster samples all kept by pruning and connected among themselves.
  bool event_a = false;
  //! More than delta * n samples in the cluster.
  bool event_b = false;
  //! No surviving edge into another cluster's surviving samples.
  bool event_i = false;
  //! Event C: samples survive and share one final component.
  bool connected_in_result = false;
  double r_min = 0.0;
  double r_tilde_max = 0.0;
};

struct IdentificationReport
{
  std::vector<ClusterVerdict> clusters;
  std::size_t n_cluster = 0;
  std::size_t n_no_cluster = 0;
  //! n_no_cluster / n_cluster; 0 when both are zero, +inf when only n_cluster is.
  double ratio = 0.0;
  //! Fewer than delta * n samples in the boundary strips.
  bool event_e = true;
  //! sup_i |p_hat(X_i) - p(X_i)| <= eps.
  bool event_d = true;
  std::size_t strip_count = 0;
  double sup_error = 0.0;
  bool no_background_only_component = true;

  bool all_identified() const;
};

/// Inputs beyond the result itself. Leave estimate null for the noise-free
/// case, where events D and E hold vacuously.
struct AssessContext
{
  const DensityModel& model;
  const PointCloud& cloud;
  const NeighborLists& lists;
  const DensityEstimate* estimate = nullptr;
  double eps = 0.0;
  double delta = 0.0;
};

IdentificationReport assess(const ClusterResult& result,
                            const GroundTruth& truth,
                            const AssessContext& context);

//! "index label" per point; label is the final component id or -1.
void write_label_file(std::ostream& os, const ClusterResult& result);

} // namespace knnclust
