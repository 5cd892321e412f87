#pragma once

#include "knnclust/harness/config.hpp"
#include "knnclust/harness/stats.hpp"
#include "knnclust/harness/trial.hpp"

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <utility>
#include <vector>

namespace knnclust::harness {

struct CellSummary
{
  Cell cell;
  std::size_t errors = 0;
  ProbabilityEstimate all;
  //! Per-cluster rough identification.
  std::vector<ProbabilityEstimate> clusters;
  double median_ratio = 0.0;
};

struct SweepResult
{
  int m = 0;
  //! Sorted by cell, then trial.
  std::vector<TrialRecord> records;
  std::vector<CellSummary> summary;
  //! (n, flavor) -> empirical-best k, ties toward smaller k.
  std::map<std::pair<std::size_t, Flavor>, std::size_t> best_k;
};

SweepResult sweep(const ExperimentConfig& config, std::size_t jobs = 1);

std::vector<CellSummary> summarize(const std::vector<TrialRecord>& records, int m);

std::map<std::pair<std::size_t, Flavor>, std::size_t> best_k(
  const std::vector<CellSummary>& summary);

void write_records(std::ostream& os, const SweepResult& result);
void write_summary_csv(std::ostream& os, const SweepResult& result);
void write_summary_json(std::ostream& os, const SweepResult& result);
void write_timings(std::ostream& os, const SweepResult& result);

/// records.csv, summary.csv, summary.json, best_k.csv and timings.csv in dir.
void write_outputs(const std::filesystem::path& dir, const SweepResult& result);

} // namespace knnclust::harness
