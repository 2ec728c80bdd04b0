#pragma once

#include <compare>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace critsoup {

/// Integer lattice coordinate.
struct Coord {
  int x = 0;
  int y = 0;
  auto operator<=>(const Coord&) const = default;
};

/// Edge between two interior vertices, a < b.
struct Edge {
  int a = 0;
  int b = 0;
  double conductance = 1.0;
};

/// Edge between a boundary vertex and an interior vertex.
struct BoundaryEdge {
  int boundary = 0;
  int interior = 0;
  double conductance = 1.0;
};

struct Neighbor {
  int vertex = 0;  // interior index
  int edge = 0;    // index into DomainGraph::edges()
  double conductance = 1.0;
};

struct BoundaryLink {
  int boundary = 0;  // boundary index
  int edge = 0;      // index into DomainGraph::boundary_edges()
  double conductance = 1.0;
};

/// Finite planar lattice domain: interior vertices, absorbing boundary
/// vertices, and symmetric positive conductances.
///
/// Invariants (checked on construction): interior and boundary are disjoint,
/// conductances are positive, and every interior vertex is joined to the
/// boundary through interior edges, so the killed walk dies almost surely.
/// Immutable after construction.
class DomainGraph {
 public:
  DomainGraph(std::vector<Coord> interior, std::vector<Coord> boundary, std::vector<Edge> edges,
              std::vector<BoundaryEdge> boundary_edges, double mesh = 1.0);

  /// Unit-conductance nearest-neighbour graph on `interior`; the boundary is
  /// the set of lattice neighbours outside it.
  static DomainGraph from_interior(std::vector<Coord> interior, double mesh = 1.0);

  static DomainGraph from_json(const std::string& text);
  std::string to_json() const;

  std::size_t size() const { return interior_.size(); }
  std::size_t boundary_size() const { return boundary_.size(); }
  double mesh() const { return mesh_; }

  const std::vector<Coord>& interior() const { return interior_; }
  const std::vector<Coord>& boundary() const { return boundary_; }
  const Coord& coord(int v) const { return interior_[static_cast<std::size_t>(v)]; }
  const Coord& boundary_coord(int b) const { return boundary_[static_cast<std::size_t>(b)]; }

  const std::vector<Edge>& edges() const { return edges_; }
  const std::vector<BoundaryEdge>& boundary_edges() const { return boundary_edges_; }

  std::span<const Neighbor> neighbors(int v) const;
  std::span<const BoundaryLink> boundary_links(int v) const;

  /// Total conductance at v, boundary edges included.
  double kappa(int v) const { return kappa_[static_cast<std::size_t>(v)]; }
  /// Conductance from v to the boundary.
  double boundary_conductance(int v) const { return kappa_boundary_[static_cast<std::size_t>(v)]; }

  /// Interior index at c, or -1.
  int find_interior(Coord c) const;
  /// Boundary index at c, or -1.
  int find_boundary(Coord c) const;
  /// Interior edge id joining a and b, or -1.
  int edge_between(int a, int b) const;

  /// Graph on the given interior vertices (parent indices, any order); every
  /// parent vertex adjacent to the subset but outside it becomes a boundary
  /// vertex. Conductances are inherited. The new interior index i corresponds
  /// to parent vertex subset[i].
  DomainGraph restrict_to(std::span<const int> subset) const;

  bool is_bipartite() const;

 private:
  void index_sites();
  void build_adjacency();
  void validate() const;

  std::vector<Coord> interior_;
  std::vector<Coord> boundary_;
  std::vector<Edge> edges_;
  std::vector<BoundaryEdge> boundary_edges_;
  double mesh_ = 1.0;

  std::vector<std::size_t> nbr_offset_;
  std::vector<Neighbor> nbr_;
  std::vector<std::size_t> blink_offset_;
  std::vector<BoundaryLink> blink_;
  std::vector<double> kappa_;
  std::vector<double> kappa_boundary_;

  // Dense site table over the bounding box: >= 0 interior, <= -2 boundary
  // (-2 - index), -1 neither.
  int box_x0_ = 0;
  int box_y0_ = 0;
  int box_w_ = 0;
  int box_h_ = 0;
  std::vector<int> site_;
};

/// Lattice points with |v| < radius_cells.
DomainGraph build_disk_graph(int radius_cells);
/// width x height block with corner at the origin.
DomainGraph build_rect_graph(int width, int height);

/// Green function of the killed walk, L^{-1}, indexed by interior vertex.
struct GreenMatrix {
  Eigen::MatrixXd values;

  std::size_t size() const { return static_cast<std::size_t>(values.rows()); }
  double operator()(int x, int y) const { return values(x, y); }
};

/// Conductance Laplacian: L_xx = kappa(x), L_xy = -C_xy.
Eigen::MatrixXd laplacian(const DomainGraph& g);

/// Dense inverse of the Laplacian. Throws std::runtime_error when the
/// Laplacian is singular (disconnected from the boundary).
GreenMatrix green_function(const DomainGraph& g);

/// Green function of the walk killed on leaving `subset` (parent interior
/// indices; the result is indexed by position in `subset`). Empty subset
/// yields a 0x0 matrix.
GreenMatrix green_function_on_subdomain(const DomainGraph& g, std::span<const int> subset);

/// Column `position` of green_function_on_subdomain via a sparse solve.
Eigen::VectorXd green_column_on_subdomain(const DomainGraph& g, std::span<const int> subset, int position);

/// max |(L G - I)_xy|.
double laplacian_residual(const DomainGraph& g, const GreenMatrix& G);
/// max_x |sum_i kappa_boundary(i) G(i, x) - 1|.
double killing_residual(const DomainGraph& g, const GreenMatrix& G);

}  // namespace critsoup
