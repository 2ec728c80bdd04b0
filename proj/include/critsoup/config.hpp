#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "critsoup/grid.hpp"

namespace critsoup {

/// Configuration error naming the offending key.
class ConfigError : public std::runtime_error {
 public:
  ConfigError(std::string key, const std::string& message)
      : std::runtime_error(key + ": " + message), key_(std::move(key)) {}
  const std::string& key() const { return key_; }

 private:
  std::string key_;
};

struct GraphSpec {
  enum class Kind { kDisk, kRect };
  Kind kind = Kind::kDisk;
  int radius = 4;
  int width = 1;
  int height = 1;

  static GraphSpec disk(int r) { return {Kind::kDisk, r, 1, 1}; }
  static GraphSpec rect(int w, int h) { return {Kind::kRect, 0, w, h}; }

  DomainGraph build() const;
  std::string describe() const;
  /// Vertex closest to the geometric centre.
  Coord centre() const;
};

/// Experiment parameters in continuum units (central charge c, continuum
/// beta). Unset optionals fall back to per-experiment defaults.
struct ExperimentConfig {
  std::optional<GraphSpec> graph;
  double c = 1.0;
  int l_max = 0;  // 0: choose from tail_tolerance
  double tail_tolerance = 1e-6;
  std::vector<double> beta_candidates{0.125, 0.25, 0.5};
  std::vector<double> u_values{0.5, 1.0, 2.0};
  std::optional<std::size_t> replicas;
  std::optional<std::size_t> min_effective;
  std::optional<int> large_radius;  // 0 disables the radius trend
  std::optional<std::size_t> large_min_effective;
  double bridge_factor = 2.0;
  std::uint64_t seed = 20261016;
  int threads = 0;  // 0: hardware concurrency
  std::string out_dir = ".";

  double alpha() const;
};

/// Parses a JSON document. Recognized keys: graph {type, radius, width,
/// height}, c, alpha, l_max, tail_tolerance, beta_candidates, u_values,
/// replicas, min_effective, large_radius, large_min_effective,
/// bridge_factor, seed, threads, out_dir. Unknown keys are rejected.
ExperimentConfig parse_config(const std::string& text);
ExperimentConfig load_config(const std::string& path);

/// Throws ConfigError when a value is out of range. `statistical` requires
/// at least 1000 replicas when replicas are set explicitly.
void validate(const ExperimentConfig& cfg, bool statistical);

}  // namespace critsoup
