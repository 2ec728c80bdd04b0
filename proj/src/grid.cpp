#include "critsoup/grid.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <map>
#include <stdexcept>

#include <Eigen/Sparse>
#include <json.hpp>

namespace critsoup {
namespace {

constexpr Coord kSteps[4] = {{1, 0}, {0, 1}, {-1, 0}, {0, -1}};

Coord operator+(Coord a, Coord b) { return {a.x + b.x, a.y + b.y}; }

}  // namespace

DomainGraph::DomainGraph(std::vector<Coord> interior, std::vector<Coord> boundary, std::vector<Edge> edges,
                         std::vector<BoundaryEdge> boundary_edges, double mesh)
    : interior_(std::move(interior)),
      boundary_(std::move(boundary)),
      edges_(std::move(edges)),
      boundary_edges_(std::move(boundary_edges)),
      mesh_(mesh) {
  if (!(mesh_ > 0.0)) throw std::invalid_argument("DomainGraph: mesh must be positive");
  for (auto& e : edges_) {
    if (e.a > e.b) std::swap(e.a, e.b);
  }
  index_sites();
  build_adjacency();
  validate();
}

void DomainGraph::index_sites() {
  int x0 = std::numeric_limits<int>::max();
  int y0 = std::numeric_limits<int>::max();
  int x1 = std::numeric_limits<int>::min();
  int y1 = std::numeric_limits<int>::min();
  auto extend = [&](const Coord& c) {
    x0 = std::min(x0, c.x);
    y0 = std::min(y0, c.y);
    x1 = std::max(x1, c.x);
    y1 = std::max(y1, c.y);
  };
  for (const auto& c : interior_) extend(c);
  for (const auto& c : boundary_) extend(c);
  if (interior_.empty() && boundary_.empty()) {
    box_w_ = box_h_ = 0;
    site_.clear();
    return;
  }
  box_x0_ = x0;
  box_y0_ = y0;
  box_w_ = x1 - x0 + 1;
  box_h_ = y1 - y0 + 1;
  site_.assign(static_cast<std::size_t>(box_w_) * static_cast<std::size_t>(box_h_), -1);
  auto slot = [&](const Coord& c) -> int& {
    return site_[static_cast<std::size_t>(c.y - box_y0_) * static_cast<std::size_t>(box_w_) +
                 static_cast<std::size_t>(c.x - box_x0_)];
  };
  for (std::size_t i = 0; i < interior_.size(); ++i) {
    int& s = slot(interior_[i]);
    if (s != -1) throw std::invalid_argument("DomainGraph: duplicate interior coordinate");
    s = static_cast<int>(i);
  }
  for (std::size_t b = 0; b < boundary_.size(); ++b) {
    int& s = slot(boundary_[b]);
    if (s >= 0) throw std::invalid_argument("DomainGraph: interior and boundary vertex sets overlap");
    if (s != -1) throw std::invalid_argument("DomainGraph: duplicate boundary coordinate");
    s = -2 - static_cast<int>(b);
  }
}

void DomainGraph::build_adjacency() {
  const std::size_t n = interior_.size();
  const int ni = static_cast<int>(n);
  const int nb = static_cast<int>(boundary_.size());
  std::vector<std::size_t> deg(n, 0);
  std::vector<std::size_t> bdeg(n, 0);
  for (const auto& e : edges_) {
    if (e.a < 0 || e.b >= ni || e.a == e.b) throw std::invalid_argument("DomainGraph: bad interior edge");
    if (!(e.conductance > 0.0)) throw std::invalid_argument("DomainGraph: conductances must be positive");
    ++deg[static_cast<std::size_t>(e.a)];
    ++deg[static_cast<std::size_t>(e.b)];
  }
  for (const auto& e : boundary_edges_) {
    if (e.interior < 0 || e.interior >= ni || e.boundary < 0 || e.boundary >= nb) {
      throw std::invalid_argument("DomainGraph: bad boundary edge");
    }
    if (!(e.conductance > 0.0)) throw std::invalid_argument("DomainGraph: conductances must be positive");
    ++bdeg[static_cast<std::size_t>(e.interior)];
  }
  nbr_offset_.assign(n + 1, 0);
  blink_offset_.assign(n + 1, 0);
  for (std::size_t v = 0; v < n; ++v) {
    nbr_offset_[v + 1] = nbr_offset_[v] + deg[v];
    blink_offset_[v + 1] = blink_offset_[v] + bdeg[v];
  }
  nbr_.assign(nbr_offset_[n], {});
  blink_.assign(blink_offset_[n], {});
  std::vector<std::size_t> fill(nbr_offset_.begin(), nbr_offset_.end() - 1);
  std::vector<std::size_t> bfill(blink_offset_.begin(), blink_offset_.end() - 1);
  kappa_.assign(n, 0.0);
  kappa_boundary_.assign(n, 0.0);
  for (std::size_t id = 0; id < edges_.size(); ++id) {
    const auto& e = edges_[id];
    const auto a = static_cast<std::size_t>(e.a);
    const auto b = static_cast<std::size_t>(e.b);
    nbr_[fill[a]++] = {e.b, static_cast<int>(id), e.conductance};
    nbr_[fill[b]++] = {e.a, static_cast<int>(id), e.conductance};
    kappa_[a] += e.conductance;
    kappa_[b] += e.conductance;
  }
  for (std::size_t id = 0; id < boundary_edges_.size(); ++id) {
    const auto& e = boundary_edges_[id];
    const auto v = static_cast<std::size_t>(e.interior);
    blink_[bfill[v]++] = {e.boundary, static_cast<int>(id), e.conductance};
    kappa_[v] += e.conductance;
    kappa_boundary_[v] += e.conductance;
  }
  // Detect duplicate interior edges.
  for (std::size_t v = 0; v < n; ++v) {
    auto first = nbr_.begin() + static_cast<std::ptrdiff_t>(nbr_offset_[v]);
    auto last = nbr_.begin() + static_cast<std::ptrdiff_t>(nbr_offset_[v + 1]);
    std::vector<int> seen;
    for (auto it = first; it != last; ++it) seen.push_back(it->vertex);
    std::sort(seen.begin(), seen.end());
    if (std::adjacent_find(seen.begin(), seen.end()) != seen.end()) {
      throw std::invalid_argument("DomainGraph: duplicate interior edge");
    }
  }
}

void DomainGraph::validate() const {
  const std::size_t n = interior_.size();
  std::vector<char> reached(n, 0);
  std::deque<int> queue;
  for (std::size_t v = 0; v < n; ++v) {
    if (kappa_boundary_[v] > 0.0) {
      reached[v] = 1;
      queue.push_back(static_cast<int>(v));
    }
  }
  while (!queue.empty()) {
    const int v = queue.front();
    queue.pop_front();
    for (const auto& nb : neighbors(v)) {
      if (!reached[static_cast<std::size_t>(nb.vertex)]) {
        reached[static_cast<std::size_t>(nb.vertex)] = 1;
        queue.push_back(nb.vertex);
      }
    }
  }
  for (std::size_t v = 0; v < n; ++v) {
    if (!reached[v]) throw std::invalid_argument("DomainGraph: interior vertex has no path to the boundary");
  }
}

DomainGraph DomainGraph::from_interior(std::vector<Coord> interior, double mesh) {
  std::map<Coord, int> index;
  for (std::size_t i = 0; i < interior.size(); ++i) {
    if (!index.emplace(interior[i], static_cast<int>(i)).second) {
      throw std::invalid_argument("DomainGraph: duplicate interior coordinate");
    }
  }
  std::vector<Coord> boundary;
  std::map<Coord, int> bindex;
  std::vector<Edge> edges;
  std::vector<BoundaryEdge> bedges;
  for (std::size_t i = 0; i < interior.size(); ++i) {
    for (const auto& step : kSteps) {
      const Coord c = interior[i] + step;
      auto it = index.find(c);
      if (it != index.end()) {
        if (it->second > static_cast<int>(i)) edges.push_back({static_cast<int>(i), it->second, 1.0});
        continue;
      }
      auto [bit, inserted] = bindex.emplace(c, static_cast<int>(boundary.size()));
      if (inserted) boundary.push_back(c);
      bedges.push_back({bit->second, static_cast<int>(i), 1.0});
    }
  }
  return DomainGraph(std::move(interior), std::move(boundary), std::move(edges), std::move(bedges), mesh);
}

std::span<const Neighbor> DomainGraph::neighbors(int v) const {
  const auto i = static_cast<std::size_t>(v);
  return {nbr_.data() + nbr_offset_[i], nbr_offset_[i + 1] - nbr_offset_[i]};
}

std::span<const BoundaryLink> DomainGraph::boundary_links(int v) const {
  const auto i = static_cast<std::size_t>(v);
  return {blink_.data() + blink_offset_[i], blink_offset_[i + 1] - blink_offset_[i]};
}

int DomainGraph::find_interior(Coord c) const {
  const int dx = c.x - box_x0_;
  const int dy = c.y - box_y0_;
  if (dx < 0 || dy < 0 || dx >= box_w_ || dy >= box_h_) return -1;
  const int s = site_[static_cast<std::size_t>(dy) * static_cast<std::size_t>(box_w_) + static_cast<std::size_t>(dx)];
  return s >= 0 ? s : -1;
}

int DomainGraph::find_boundary(Coord c) const {
  const int dx = c.x - box_x0_;
  const int dy = c.y - box_y0_;
  if (dx < 0 || dy < 0 || dx >= box_w_ || dy >= box_h_) return -1;
  const int s = site_[static_cast<std::size_t>(dy) * static_cast<std::size_t>(box_w_) + static_cast<std::size_t>(dx)];
  return s <= -2 ? -2 - s : -1;
}

int DomainGraph::edge_between(int a, int b) const {
  for (const auto& nb : neighbors(a)) {
    if (nb.vertex == b) return nb.edge;
  }
  return -1;
}

DomainGraph DomainGraph::restrict_to(std::span<const int> subset) const {
  std::vector<int> local(interior_.size(), -1);
  std::vector<Coord> interior;
  interior.reserve(subset.size());
  for (std::size_t i = 0; i < subset.size(); ++i) {
    const auto p = static_cast<std::size_t>(subset[i]);
    if (p >= interior_.size()) throw std::invalid_argument("restrict_to: vertex out of range");
    if (local[p] != -1) throw std::invalid_argument("restrict_to: duplicate vertex");
    local[p] = static_cast<int>(i);
    interior.push_back(interior_[p]);
  }
  std::vector<Coord> boundary;
  std::map<Coord, int> bindex;
  std::vector<Edge> edges;
  std::vector<BoundaryEdge> bedges;
  auto boundary_id = [&](const Coord& c) {
    auto [it, inserted] = bindex.emplace(c, static_cast<int>(boundary.size()));
    if (inserted) boundary.push_back(c);
    return it->second;
  };
  for (std::size_t i = 0; i < subset.size(); ++i) {
    const int p = subset[i];
    for (const auto& nb : neighbors(p)) {
      const int q = local[static_cast<std::size_t>(nb.vertex)];
      if (q >= 0) {
        if (q > static_cast<int>(i)) edges.push_back({static_cast<int>(i), q, nb.conductance});
      } else {
        bedges.push_back({boundary_id(coord(nb.vertex)), static_cast<int>(i), nb.conductance});
      }
    }
    for (const auto& bl : boundary_links(p)) {
      bedges.push_back({boundary_id(boundary_coord(bl.boundary)), static_cast<int>(i), bl.conductance});
    }
  }
  return DomainGraph(std::move(interior), std::move(boundary), std::move(edges), std::move(bedges), mesh_);
}

bool DomainGraph::is_bipartite() const {
  std::vector<int> colour(interior_.size(), -1);
  for (std::size_t s = 0; s < interior_.size(); ++s) {
    if (colour[s] != -1) continue;
    colour[s] = 0;
    std::deque<int> queue{static_cast<int>(s)};
    while (!queue.empty()) {
      const int v = queue.front();
      queue.pop_front();
      for (const auto& nb : neighbors(v)) {
        auto& c = colour[static_cast<std::size_t>(nb.vertex)];
        if (c == -1) {
          c = 1 - colour[static_cast<std::size_t>(v)];
          queue.push_back(nb.vertex);
        } else if (c == colour[static_cast<std::size_t>(v)]) {
          return false;
        }
      }
    }
  }
  return true;
}

std::string DomainGraph::to_json() const {
  nlohmann::json j;
  j["mesh"] = mesh_;
  auto coords = [](const std::vector<Coord>& cs) {
    auto a = nlohmann::json::array();
    for (const auto& c : cs) a.push_back({c.x, c.y});
    return a;
  };
  j["interior"] = coords(interior_);
  j["boundary"] = coords(boundary_);
  auto e = nlohmann::json::array();
  for (const auto& ed : edges_) e.push_back({ed.a, ed.b, ed.conductance});
  j["edges"] = e;
  auto be = nlohmann::json::array();
  for (const auto& ed : boundary_edges_) be.push_back({ed.boundary, ed.interior, ed.conductance});
  j["boundary_edges"] = be;
  return j.dump();
}

DomainGraph DomainGraph::from_json(const std::string& text) {
  const auto j = nlohmann::json::parse(text);
  auto coords = [](const nlohmann::json& a) {
    std::vector<Coord> out;
    for (const auto& c : a) out.push_back({c.at(0).get<int>(), c.at(1).get<int>()});
    return out;
  };
  std::vector<Edge> edges;
  for (const auto& e : j.at("edges")) edges.push_back({e.at(0).get<int>(), e.at(1).get<int>(), e.at(2).get<double>()});
  std::vector<BoundaryEdge> bedges;
  for (const auto& e : j.at("boundary_edges")) {
    bedges.push_back({e.at(0).get<int>(), e.at(1).get<int>(), e.at(2).get<double>()});
  }
  return DomainGraph(coords(j.at("interior")), coords(j.at("boundary")), std::move(edges), std::move(bedges),
                     j.value("mesh", 1.0));
}

DomainGraph build_disk_graph(int radius_cells) {
  if (radius_cells < 1) throw std::invalid_argument("build_disk_graph: radius_cells must be >= 1");
  std::vector<Coord> interior;
  const int r2 = radius_cells * radius_cells;
  for (int y = -radius_cells; y <= radius_cells; ++y) {
    for (int x = -radius_cells; x <= radius_cells; ++x) {
      if (x * x + y * y < r2) interior.push_back({x, y});
    }
  }
  return DomainGraph::from_interior(std::move(interior), 1.0 / radius_cells);
}

DomainGraph build_rect_graph(int width, int height) {
  if (width < 1 || height < 1) throw std::invalid_argument("build_rect_graph: dimensions must be >= 1");
  std::vector<Coord> interior;
  for (int y = 0; y < height; ++y) {
    for (int x = 0; x < width; ++x) interior.push_back({x, y});
  }
  return DomainGraph::from_interior(std::move(interior), 1.0 / std::max(width, height));
}

Eigen::MatrixXd laplacian(const DomainGraph& g) {
  const auto n = static_cast<Eigen::Index>(g.size());
  Eigen::MatrixXd L = Eigen::MatrixXd::Zero(n, n);
  for (Eigen::Index v = 0; v < n; ++v) L(v, v) = g.kappa(static_cast<int>(v));
  for (const auto& e : g.edges()) {
    L(e.a, e.b) -= e.conductance;
    L(e.b, e.a) -= e.conductance;
  }
  return L;
}

GreenMatrix green_function(const DomainGraph& g) {
  GreenMatrix G;
  const auto n = static_cast<Eigen::Index>(g.size());
  if (n == 0) return G;
  Eigen::LLT<Eigen::MatrixXd> llt(laplacian(g));
  if (llt.info() != Eigen::Success) throw std::runtime_error("green_function: singular Laplacian");
  G.values = llt.solve(Eigen::MatrixXd::Identity(n, n));
  // Symmetrize away round-off.
  G.values = 0.5 * (G.values + G.values.transpose()).eval();
  return G;
}

namespace {

Eigen::SparseMatrix<double> subdomain_laplacian(const DomainGraph& g, std::span<const int> subset) {
  std::vector<int> local(g.size(), -1);
  for (std::size_t i = 0; i < subset.size(); ++i) {
    const auto p = static_cast<std::size_t>(subset[i]);
    if (p >= g.size()) throw std::invalid_argument("subdomain: vertex out of range");
    if (local[p] != -1) throw std::invalid_argument("subdomain: duplicate vertex");
    local[p] = static_cast<int>(i);
  }
  std::vector<Eigen::Triplet<double>> t;
  t.reserve(subset.size() * 5);
  for (std::size_t i = 0; i < subset.size(); ++i) {
    const int v = subset[i];
    t.emplace_back(static_cast<int>(i), static_cast<int>(i), g.kappa(v));
    for (const auto& nb : g.neighbors(v)) {
      const int q = local[static_cast<std::size_t>(nb.vertex)];
      if (q >= 0) t.emplace_back(static_cast<int>(i), q, -nb.conductance);
    }
  }
  const auto m = static_cast<Eigen::Index>(subset.size());
  Eigen::SparseMatrix<double> L(m, m);
  L.setFromTriplets(t.begin(), t.end());
  return L;
}

}  // namespace

GreenMatrix green_function_on_subdomain(const DomainGraph& g, std::span<const int> subset) {
  GreenMatrix G;
  if (subset.empty()) {
    G.values.resize(0, 0);
    return G;
  }
  const Eigen::MatrixXd L = Eigen::MatrixXd(subdomain_laplacian(g, subset));
  Eigen::LLT<Eigen::MatrixXd> llt(L);
  if (llt.info() != Eigen::Success) throw std::runtime_error("green_function_on_subdomain: singular Laplacian");
  const auto m = L.rows();
  G.values = llt.solve(Eigen::MatrixXd::Identity(m, m));
  G.values = 0.5 * (G.values + G.values.transpose()).eval();
  return G;
}

Eigen::VectorXd green_column_on_subdomain(const DomainGraph& g, std::span<const int> subset, int position) {
  if (position < 0 || static_cast<std::size_t>(position) >= subset.size()) {
    throw std::invalid_argument("green_column_on_subdomain: position out of range");
  }
  const auto L = subdomain_laplacian(g, subset);
  Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> solver(L);
  if (solver.info() != Eigen::Success) throw std::runtime_error("green_column_on_subdomain: singular Laplacian");
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(L.rows());
  rhs(position) = 1.0;
  return solver.solve(rhs);
}

double laplacian_residual(const DomainGraph& g, const GreenMatrix& G) {
  if (g.size() == 0) return 0.0;
  const Eigen::MatrixXd R = laplacian(g) * G.values - Eigen::MatrixXd::Identity(G.values.rows(), G.values.cols());
  return R.cwiseAbs().maxCoeff();
}

double killing_residual(const DomainGraph& g, const GreenMatrix& G) {
  double worst = 0.0;
  const auto n = static_cast<int>(g.size());
  for (int x = 0; x < n; ++x) {
    double s = 0.0;
    for (int i = 0; i < n; ++i) s += g.boundary_conductance(i) * G(i, x);
    worst = std::max(worst, std::abs(s - 1.0));
  }
  return worst;
}

}  // namespace critsoup
