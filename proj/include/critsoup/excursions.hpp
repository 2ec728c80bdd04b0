#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "critsoup/cable.hpp"
#include "critsoup/grid.hpp"
#include "critsoup/loopsoup.hpp"
#include "critsoup/random.hpp"

namespace critsoup {

/// Continuum excursion intensity beta (density beta * pi per unit area)
/// expressed as the discrete per-edge rate, whose density is the rate itself.
inline constexpr double kDiscreteRatePerBeta = 3.14159265358979323846;
inline constexpr double discrete_rate(double beta) { return kDiscreteRatePerBeta * beta; }

/// Boundary-to-boundary path. For sampled processes `from`/`to` are
/// boundary indices of the sampling graph; for excursions extracted from
/// loops they are vertex indices of the parent graph lying on the rim.
/// `path` lists the interior visits in order; `holding` has one entry per
/// visit.
struct Excursion {
  int from = -1;
  int to = -1;
  std::vector<int> path;
  std::vector<double> holding;

  std::size_t length() const { return path.size(); }
};

struct ExcursionProcess {
  double rate = 0.0;  // per unit boundary conductance
  std::vector<Excursion> excursions;
};

/// Poisson(rate * C_bi) excursions through every boundary edge (b, i); each
/// runs the killed walk from i with Exp(1)/kappa holding times until it
/// steps onto the boundary.
ExcursionProcess sample_excursions(const DomainGraph& g, double rate, RandomStream& rng);

struct ExcursionOccupation {
  double rate = 0.0;
  std::vector<std::uint64_t> visits;
  std::vector<double> local_time;

  /// local_time(x) - rate; the exact mean is the rate at every vertex.
  std::vector<double> recentered() const;
};

ExcursionOccupation excursion_occupation(const ExcursionProcess& proc, const DomainGraph& g);

/// Decomposition of the soup around the outermost cluster surrounding v0.
///
/// `domain` is the enclosed region with the rim removed: every neighbour of
/// a domain vertex outside the domain lies on the rim. Interior loops stay in
/// the domain; touching loops visit the rim and are cut into excursions at
/// their rim visits.
struct Decomposition {
  int component = -1;
  BoundaryTrace trace;
  std::vector<int> domain;  // ascending parent indices
  std::vector<std::size_t> interior_loops;
  std::vector<std::size_t> touching_loops;
  std::vector<Excursion> excursions;
};

std::optional<Decomposition> boundary_excursion_decomposition(const LoopSoup& soup, const ClusterSet& clusters,
                                                              const DomainGraph& g, int v0);

/// Cuts one loop at its visits to `on_rim` vertices. Sub-paths with no
/// interior visit are skipped.
std::vector<Excursion> split_at_rim(const RootedLoop& loop, const std::vector<char>& on_rim);

/// Summary statistics of a set of excursions on a domain.
struct ExcursionFunctionals {
  double total_local_time = 0.0;
  double near_rim_local_time = 0.0;  // at domain vertices adjacent to the rim
  double max_length = 0.0;
  double count = 0.0;
};

/// `local` maps each path vertex to a domain index (or -1 when the path is
/// already in domain indices: pass an empty vector). `near_rim` is indexed by
/// domain index.
ExcursionFunctionals excursion_functionals(const std::vector<Excursion>& excursions, const std::vector<int>& local,
                                           const std::vector<char>& near_rim);

}  // namespace critsoup
