#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "critsoup/config.hpp"
#include "critsoup/grid.hpp"
#include "critsoup/report.hpp"

namespace critsoup {

struct ExperimentInfo {
  std::string id;
  std::string summary;
};

/// Every experiment id understood by run_experiment, in a stable order.
const std::vector<ExperimentInfo>& experiment_catalog();

/// Runs one experiment. Throws std::invalid_argument on an unknown id.
StatReport run_experiment(const std::string& id, const ExperimentConfig& cfg);

StatReport check_green(const ExperimentConfig& cfg);
StatReport check_gff_covariance(const ExperimentConfig& cfg);
StatReport check_le_jan(const ExperimentConfig& cfg);
StatReport check_loop_oracle(const ExperimentConfig& cfg);
StatReport check_lupu_consistency(const ExperimentConfig& cfg);
StatReport check_prop_p1(const ExperimentConfig& cfg);
StatReport check_lemma_lt(const ExperimentConfig& cfg);
StatReport check_dynkin(const ExperimentConfig& cfg);
StatReport check_flagship(const ExperimentConfig& cfg);
StatReport check_interior_soup(const ExperimentConfig& cfg);
StatReport check_independence(const ExperimentConfig& cfg);
StatReport check_constants(const ExperimentConfig& cfg);

/// Dynkin isomorphism at one shift u on graph g: per-vertex KS between
/// 1/2 :(phi+u)^2: and 1/2 :phi'^2: + recentered excursion occupation at
/// rate u^2/2, plus mean and variance identities.
StatReport dynkin_check(const DomainGraph& g, double u, std::size_t replicas, std::uint64_t seed, int threads);

/// Flagship decomposition test on one graph. Runs `replicas` replicas when
/// non-zero, otherwise batches of replicas until `min_effective` of them
/// have a cluster surrounding v0.
struct FlagshipOutcome {
  StatReport report{"flagship"};
  std::size_t replicas = 0;
  std::size_t effective = 0;
  double total_ratio = 0.0;     // extracted / sampled at beta = 1/4
  double total_ratio_se = 0.0;  // standard error of that ratio
};
FlagshipOutcome flagship_experiment(const DomainGraph& g, int v0, const std::vector<double>& betas,
                                    std::size_t replicas, std::size_t min_effective, const ExperimentConfig& cfg);

}  // namespace critsoup
