#pragma once

#include "knnclust/graph.hpp"
#include "knnclust/harness/config.hpp"
#include "knnclust/identify.hpp"
#include "knnclust/model.hpp"

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace knnclust::harness {

struct Cell
{
  std::size_t n = 0;
  std::size_t k = 0;
  Flavor flavor = Flavor::Mutual;

  auto operator<=>(const Cell&) const = default;
};

struct TrialRecord
{
  std::size_t n = 0;
  std::size_t k = 0;
  Flavor flavor = Flavor::Mutual;
  Mode mode = Mode::NoiseFree;
  std::size_t trial = 0;
  std::uint64_t seed = 0;
  std::vector<std::uint8_t> rough;
  bool all_identified = false;
  std::vector<std::uint8_t> event_a;
  std::vector<std::uint8_t> event_b;
  bool event_e = true;
  bool event_d = true;
  std::vector<std::uint8_t> event_i;
  std::size_t n_cluster = 0;
  std::size_t n_no_cluster = 0;
  std::vector<double> r_tilde_max;
  //! Not written to the records file; see write_timings.
  double wall_seconds = 0.0;
  //! Empty on success.
  std::string error;

  // Extra diagnostics, written after the core columns.
  double ratio = 0.0;
  double eps = 0.0;
  double h = 0.0;
  double sup_error = 0.0;
  std::size_t components = 0;
  bool no_background_only_component = true;
  std::vector<std::uint8_t> connected;

  Cell cell() const { return { n, k, flavor }; }
};

/// Trial seed: hash_combine(hash_combine(base, n), trial). The sample does
/// not depend on k or flavor, so all cells at one n see the same clouds.
std::uint64_t trial_seed(std::uint64_t base, std::size_t n, std::size_t trial);

/// Sample, estimate and nearest neighbours shared by every (k, flavor) cell
/// of one trial.
class TrialContext
{
public:
  TrialContext(const ExperimentConfig& config,
               std::size_t n,
               std::size_t trial,
               std::size_t k_max);

  TrialRecord run(std::size_t k, Flavor flavor) const;

  const PointCloud& cloud() const { return *cloud_; }
  const std::optional<std::string>& error() const { return error_; }

private:
  TrialRecord blank(std::size_t k, Flavor flavor) const;

  const ExperimentConfig& config_;
  std::size_t n_;
  std::size_t trial_;
  std::uint64_t seed_;
  int m_ = 0;
  double eps_ = 0.0;
  double h_ = 0.0;
  double setup_seconds_ = 0.0;
  std::optional<PointCloud> cloud_;
  std::optional<GroundTruth> truth_;
  std::optional<NeighborLists> lists_;
  std::optional<DensityEstimate> estimate_;
  std::optional<std::string> error_;
};

//! One full pass for a single cell; deterministic given (config, cell, trial).
TrialRecord run_trial(const ExperimentConfig& config, const Cell& cell, std::size_t trial);

//! Number of clusters at level t (0 if t is not above the background).
int cluster_count(const ExperimentConfig& config);

inline constexpr const char* kRecordsVersion = "knnclust-records-v1";

void write_records_header(std::ostream& os, int m);
void write_record(std::ostream& os, const TrialRecord& record);

} // namespace knnclust::harness
