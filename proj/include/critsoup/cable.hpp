#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "critsoup/gff.hpp"
#include "critsoup/grid.hpp"
#include "critsoup/loopsoup.hpp"
#include "critsoup/random.hpp"

namespace critsoup {

/// Multiplier k in the soup-side opening probability
/// 1 - exp(-k C sqrt(l_x l_y)) of an edge no discrete loop traversed.
inline constexpr double kSoupBridgeFactor = 2.0;

struct Component {
  std::vector<int> vertices;  // ascending
  std::vector<int> edges;     // open interior edge ids, ascending
};

/// Open edges and the connected components they induce. Every interior
/// vertex belongs to exactly one component (possibly a singleton).
struct ClusterSet {
  std::vector<char> open;   // per interior edge
  std::vector<int> label;   // per interior vertex, index into components
  std::vector<Component> components;

  std::size_t open_count() const;
  std::size_t largest_size() const;
};

/// Components of (interior vertices, open edges).
ClusterSet make_cluster_set(const DomainGraph& g, std::vector<char> open);

/// Lupu's soup-side construction: traversed edges are open; every other
/// edge opens independently with probability
/// 1 - exp(-bridge_factor C_xy sqrt(l_x l_y)).
ClusterSet clusters_from_soup(const LoopSoup& soup, const OccupationField& occ, const DomainGraph& g,
                              RandomStream& rng, double bridge_factor = kSoupBridgeFactor);

/// Sign clusters of the cable-system GFF: edge open iff phi_x phi_y > 0 and
/// an independent coin with success probability 1 - exp(-2 C phi_x phi_y)
/// succeeds.
ClusterSet clusters_from_gff(const ScalarField& phi, const DomainGraph& g, RandomStream& rng);

/// s_K sqrt(2 l_x) with one fair sign per component. Requires alpha = 1/2.
ScalarField gff_from_soup(const OccupationField& occ, const ClusterSet& clusters, RandomStream& rng);

/// Corner c of the dual lattice stands for the point (c.x + 1/2, c.y + 1/2).
struct DualEdge {
  Coord from;
  Coord to;
  bool operator==(const DualEdge&) const = default;
};

/// Outer boundary of one component.
///
/// The enclosed region is the set of lattice sites that cannot reach
/// infinity through nearest-neighbour steps avoiding the component. The
/// boundary of the union of their unit squares is a simple closed dual cycle,
/// stored counter-clockwise.
struct BoundaryTrace {
  std::vector<DualEdge> cycle;
  std::vector<int> rim;     // component vertices next to the unbounded region
  std::vector<int> inside;  // enclosed interior vertices, component included
  std::vector<int> hole;    // inside minus the component

  /// Winding number of the cycle around lattice site p (0 or 1).
  int winding(Coord p) const;
  bool encloses(Coord p) const { return winding(p) != 0; }
  bool is_simple() const;
};

BoundaryTrace outer_boundary(const Component& cluster, const DomainGraph& g);

/// Index of the outermost component whose trace encloses v0 with v0 not in
/// the component, if any.
std::optional<int> outermost_cluster_around(const ClusterSet& clusters, const DomainGraph& g, int v0);

/// Interior vertices outside A, outside every component meeting A and
/// outside the outer boundary of every such component. Ascending.
std::vector<int> explore_clusters_touching(const ClusterSet& clusters, const DomainGraph& g, std::span<const int> A);

std::string cluster_set_to_json(const ClusterSet& clusters, const DomainGraph& g);
std::string boundary_trace_to_json(const BoundaryTrace& trace, const DomainGraph& g);

}  // namespace critsoup
