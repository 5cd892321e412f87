#pragma once

#include "knnclust/graph.hpp"
#include "knnclust/model.hpp"

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <istream>
#include <optional>
#include <string>
#include <vector>

namespace knnclust::harness {

enum class Mode
{
  NoiseFree,
  Noisy
};

const char* to_string(Mode mode);
Mode parse_mode(const std::string& text);

/// How k is chosen for each (n, flavor) cell.
struct KSpec
{
  enum class Kind
  {
    Explicit,
    Sweep,
    Optimal,
    Fraction
  };

  Kind kind = Kind::Optimal;
  std::vector<std::size_t> values;
  std::size_t lo = 0, hi = 0, step = 1;
  std::vector<double> fractions;
  //! For Optimal: cluster index (0-based) or nullopt for all clusters.
  std::optional<std::size_t> cluster;

  static KSpec parse(const std::string& text);
};

/// A fixed value or the scheduled rate c0 (log n / n)^(a / (d + 4)).
struct RateSpec
{
  bool scheduled = false;
  double value = 0.0;

  static RateSpec parse(const std::string& text);
};

struct ExperimentConfig
{
  DensityModel model;
  double t = 0.0;
  std::vector<Flavor> flavors{ Flavor::Mutual };
  Mode mode = Mode::NoiseFree;
  KSpec k;
  std::vector<std::size_t> ns;
  double delta = 0.02;
  //! Unset means 0.1 t.
  std::optional<RateSpec> eps;
  std::optional<RateSpec> h;
  std::size_t trials = 200;
  std::uint64_t seed = 1;
  std::string out = "out";
  double c2 = 1.0;
  std::optional<double> eps_tilde;

  double eps_at(std::size_t n) const;
  double h_at(std::size_t n) const;
  //! k values for one cell, sorted and deduplicated, each in [1, n - 1].
  std::vector<std::size_t> k_values(std::size_t n, Flavor flavor) const;
  //! Throws ConfigError when a parameter is invalid for the mode.
  void validate() const;
};

ExperimentConfig parse_config(std::istream& in);
ExperimentConfig load_config(const std::filesystem::path& path);

} // namespace knnclust::harness
