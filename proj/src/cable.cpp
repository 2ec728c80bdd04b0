#include "critsoup/cable.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <map>
#include <numeric>
#include <stdexcept>

#include <json.hpp>

namespace critsoup {
namespace {

class DisjointSets {
 public:
  explicit DisjointSets(std::size_t n) : parent_(n), rank_(n, 0) { std::iota(parent_.begin(), parent_.end(), 0); }

  int find(int x) {
    while (parent_[static_cast<std::size_t>(x)] != x) {
      auto& p = parent_[static_cast<std::size_t>(x)];
      p = parent_[static_cast<std::size_t>(p)];
      x = p;
    }
    return x;
  }

  void unite(int a, int b) {
    a = find(a);
    b = find(b);
    if (a == b) return;
    auto& ra = rank_[static_cast<std::size_t>(a)];
    auto& rb = rank_[static_cast<std::size_t>(b)];
    if (ra < rb) std::swap(a, b);
    parent_[static_cast<std::size_t>(b)] = a;
    if (ra == rb) ++rank_[static_cast<std::size_t>(a)];
  }

 private:
  std::vector<int> parent_;
  std::vector<int> rank_;
};

// Site mask over the bounding box of a vertex set, padded by one cell.
struct SiteBox {
  int x0 = 0;
  int y0 = 0;
  int w = 0;
  int h = 0;

  std::size_t index(int x, int y) const {
    return static_cast<std::size_t>(y - y0) * static_cast<std::size_t>(w) + static_cast<std::size_t>(x - x0);
  }
  bool contains(int x, int y) const { return x >= x0 && y >= y0 && x < x0 + w && y < y0 + h; }
};

}  // namespace

std::size_t ClusterSet::open_count() const {
  return static_cast<std::size_t>(std::count(open.begin(), open.end(), char{1}));
}

std::size_t ClusterSet::largest_size() const {
  std::size_t best = 0;
  for (const auto& c : components) best = std::max(best, c.vertices.size());
  return best;
}

ClusterSet make_cluster_set(const DomainGraph& g, std::vector<char> open) {
  if (open.size() != g.edges().size()) throw std::invalid_argument("make_cluster_set: open mask size mismatch");
  const std::size_t n = g.size();
  DisjointSets dsu(n);
  for (std::size_t e = 0; e < open.size(); ++e) {
    if (open[e]) dsu.unite(g.edges()[e].a, g.edges()[e].b);
  }
  ClusterSet out;
  out.open = std::move(open);
  out.label.assign(n, -1);
  std::vector<int> root_label(n, -1);
  for (std::size_t v = 0; v < n; ++v) {
    const auto r = static_cast<std::size_t>(dsu.find(static_cast<int>(v)));
    if (root_label[r] < 0) {
      root_label[r] = static_cast<int>(out.components.size());
      out.components.emplace_back();
    }
    out.label[v] = root_label[r];
    out.components[static_cast<std::size_t>(root_label[r])].vertices.push_back(static_cast<int>(v));
  }
  for (std::size_t e = 0; e < out.open.size(); ++e) {
    if (out.open[e]) {
      const int l = out.label[static_cast<std::size_t>(g.edges()[e].a)];
      out.components[static_cast<std::size_t>(l)].edges.push_back(static_cast<int>(e));
    }
  }
  return out;
}

ClusterSet clusters_from_soup(const LoopSoup& soup, const OccupationField& occ, const DomainGraph& g,
                              RandomStream& rng, double bridge_factor) {
  if (occ.size() != g.size()) throw std::invalid_argument("clusters_from_soup: occupation size mismatch");
  const auto& edges = g.edges();
  std::vector<char> open(edges.size(), 0);
  for (const auto& loop : soup.loops) {
    const std::size_t l = loop.length();
    for (std::size_t i = 0; i < l; ++i) {
      const int e = g.edge_between(loop.vertices[i], loop.vertices[(i + 1) % l]);
      if (e < 0) throw std::invalid_argument("clusters_from_soup: loop step is not an edge");
      open[static_cast<std::size_t>(e)] = 1;
    }
  }
  for (std::size_t e = 0; e < edges.size(); ++e) {
    const double u = rng.uniform();
    if (open[e]) continue;
    const double lx = occ.local_time[static_cast<std::size_t>(edges[e].a)];
    const double ly = occ.local_time[static_cast<std::size_t>(edges[e].b)];
    const double p = -std::expm1(-bridge_factor * edges[e].conductance * std::sqrt(lx * ly));
    if (u < p) open[e] = 1;
  }
  return make_cluster_set(g, std::move(open));
}

ClusterSet clusters_from_gff(const ScalarField& phi, const DomainGraph& g, RandomStream& rng) {
  if (phi.size() != g.size()) throw std::invalid_argument("clusters_from_gff: field size mismatch");
  const auto& edges = g.edges();
  std::vector<char> open(edges.size(), 0);
  for (std::size_t e = 0; e < edges.size(); ++e) {
    const double u = rng.uniform();
    const double prod = phi[static_cast<std::size_t>(edges[e].a)] * phi[static_cast<std::size_t>(edges[e].b)];
    if (!(prod > 0.0)) continue;
    const double p = -std::expm1(-2.0 * edges[e].conductance * prod);
    if (u < p) open[e] = 1;
  }
  return make_cluster_set(g, std::move(open));
}

ScalarField gff_from_soup(const OccupationField& occ, const ClusterSet& clusters, RandomStream& rng) {
  if (std::abs(occ.alpha - alpha_from_c(1.0)) > 1e-12) {
    throw std::invalid_argument("gff_from_soup: coupling requires alpha = 1/2");
  }
  if (clusters.label.size() != occ.size()) throw std::invalid_argument("gff_from_soup: size mismatch");
  std::vector<double> sign(clusters.components.size());
  for (auto& s : sign) s = rng.bernoulli(0.5) ? 1.0 : -1.0;
  ScalarField out{FieldRole::kGff, std::vector<double>(occ.size())};
  for (std::size_t x = 0; x < occ.size(); ++x) {
    out[x] = sign[static_cast<std::size_t>(clusters.label[x])] * std::sqrt(2.0 * occ.local_time[x]);
  }
  return out;
}

int BoundaryTrace::winding(Coord p) const {
  int w = 0;
  for (const auto& e : cycle) {
    if (e.from.x != e.to.x || e.from.x < p.x) continue;
    // Vertical edge at x = a + 1/2 spanning row p.y when its corners are
    // p.y - 1 and p.y.
    const int lo = std::min(e.from.y, e.to.y);
    const int hi = std::max(e.from.y, e.to.y);
    if (lo == p.y - 1 && hi == p.y) w += e.to.y > e.from.y ? 1 : -1;
  }
  return w;
}

bool BoundaryTrace::is_simple() const {
  if (cycle.size() < 4) return false;
  std::vector<Coord> starts;
  starts.reserve(cycle.size());
  for (std::size_t i = 0; i < cycle.size(); ++i) {
    if (!(cycle[i].to == cycle[(i + 1) % cycle.size()].from)) return false;
    const int dx = std::abs(cycle[i].to.x - cycle[i].from.x);
    const int dy = std::abs(cycle[i].to.y - cycle[i].from.y);
    if (dx + dy != 1) return false;
    starts.push_back(cycle[i].from);
  }
  std::sort(starts.begin(), starts.end());
  return std::adjacent_find(starts.begin(), starts.end()) == starts.end();
}

BoundaryTrace outer_boundary(const Component& cluster, const DomainGraph& g) {
  if (cluster.vertices.empty()) throw std::invalid_argument("outer_boundary: empty cluster");
  SiteBox box;
  {
    int x0 = g.coord(cluster.vertices.front()).x;
    int x1 = x0;
    int y0 = g.coord(cluster.vertices.front()).y;
    int y1 = y0;
    for (int v : cluster.vertices) {
      const Coord& c = g.coord(v);
      x0 = std::min(x0, c.x);
      x1 = std::max(x1, c.x);
      y0 = std::min(y0, c.y);
      y1 = std::max(y1, c.y);
    }
    box = {x0 - 1, y0 - 1, x1 - x0 + 3, y1 - y0 + 3};
  }
  // 0 = unknown, 1 = cluster, 2 = outside.
  std::vector<unsigned char> state(static_cast<std::size_t>(box.w) * static_cast<std::size_t>(box.h), 0);
  for (int v : cluster.vertices) {
    const Coord& c = g.coord(v);
    state[box.index(c.x, c.y)] = 1;
  }
  std::deque<Coord> queue;
  auto seed = [&](int x, int y) {
    auto& s = state[box.index(x, y)];
    if (s == 0) {
      s = 2;
      queue.push_back({x, y});
    }
  };
  for (int x = box.x0; x < box.x0 + box.w; ++x) {
    seed(x, box.y0);
    seed(x, box.y0 + box.h - 1);
  }
  for (int y = box.y0; y < box.y0 + box.h; ++y) {
    seed(box.x0, y);
    seed(box.x0 + box.w - 1, y);
  }
  constexpr int kDx[4] = {1, 0, -1, 0};
  constexpr int kDy[4] = {0, 1, 0, -1};
  while (!queue.empty()) {
    const Coord c = queue.front();
    queue.pop_front();
    for (int d = 0; d < 4; ++d) {
      const int x = c.x + kDx[d];
      const int y = c.y + kDy[d];
      if (box.contains(x, y)) seed(x, y);
    }
  }
  auto outside = [&](int x, int y) { return !box.contains(x, y) || state[box.index(x, y)] == 2; };

  BoundaryTrace trace;
  std::map<Coord, Coord> next;
  for (int y = box.y0; y < box.y0 + box.h; ++y) {
    for (int x = box.x0; x < box.x0 + box.w; ++x) {
      if (outside(x, y)) continue;
      const int v = g.find_interior({x, y});
      if (v >= 0) {
        trace.inside.push_back(v);
        if (state[box.index(x, y)] != 1) trace.hole.push_back(v);
      }
      bool on_rim = false;
      auto emit = [&](Coord from, Coord to) {
        next.emplace(from, to);
        trace.cycle.push_back({from, to});
        on_rim = true;
      };
      if (outside(x + 1, y)) emit({x, y - 1}, {x, y});
      if (outside(x, y - 1)) emit({x - 1, y - 1}, {x, y - 1});
      if (outside(x - 1, y)) emit({x - 1, y}, {x - 1, y - 1});
      if (outside(x, y + 1)) emit({x, y}, {x - 1, y});
      if (on_rim && state[box.index(x, y)] == 1) trace.rim.push_back(v);
    }
  }
  // Chain the emitted edges into one cycle.
  const std::size_t count = trace.cycle.size();
  if (next.size() != count) throw std::logic_error("outer_boundary: boundary is not a simple cycle");
  std::vector<DualEdge> ordered;
  ordered.reserve(count);
  Coord at = trace.cycle.front().from;
  for (std::size_t i = 0; i < count; ++i) {
    const auto it = next.find(at);
    if (it == next.end()) throw std::logic_error("outer_boundary: broken boundary cycle");
    ordered.push_back({at, it->second});
    at = it->second;
  }
  if (!(at == trace.cycle.front().from)) throw std::logic_error("outer_boundary: boundary is not a single cycle");
  trace.cycle = std::move(ordered);
  std::sort(trace.inside.begin(), trace.inside.end());
  std::sort(trace.hole.begin(), trace.hole.end());
  std::sort(trace.rim.begin(), trace.rim.end());
  return trace;
}

std::optional<int> outermost_cluster_around(const ClusterSet& clusters, const DomainGraph& g, int v0) {
  const Coord p = g.coord(v0);
  // Any enclosing trace crosses the ray to the right of v0 next to one of
  // its own vertices.
  std::vector<int> candidates;
  for (std::size_t v = 0; v < g.size(); ++v) {
    const Coord& c = g.coord(static_cast<int>(v));
    if (c.y == p.y && c.x > p.x) candidates.push_back(clusters.label[v]);
  }
  std::sort(candidates.begin(), candidates.end());
  candidates.erase(std::unique(candidates.begin(), candidates.end()), candidates.end());
  const int own = clusters.label[static_cast<std::size_t>(v0)];
  std::optional<int> best;
  std::size_t best_size = 0;
  for (int k : candidates) {
    if (k == own) continue;
    const BoundaryTrace trace = outer_boundary(clusters.components[static_cast<std::size_t>(k)], g);
    if (!std::binary_search(trace.inside.begin(), trace.inside.end(), v0)) continue;
    if (!best || trace.inside.size() > best_size) {
      best = k;
      best_size = trace.inside.size();
    }
  }
  return best;
}

std::vector<int> explore_clusters_touching(const ClusterSet& clusters, const DomainGraph& g,
                                           std::span<const int> A) {
  const std::size_t n = g.size();
  std::vector<char> removed(n, 0);
  std::vector<char> touched(clusters.components.size(), 0);
  for (int a : A) {
    if (a < 0 || static_cast<std::size_t>(a) >= n) throw std::invalid_argument("explore_clusters_touching: bad vertex");
    removed[static_cast<std::size_t>(a)] = 1;
    touched[static_cast<std::size_t>(clusters.label[static_cast<std::size_t>(a)])] = 1;
  }
  for (std::size_t k = 0; k < touched.size(); ++k) {
    if (!touched[k]) continue;
    const BoundaryTrace trace = outer_boundary(clusters.components[k], g);
    for (int v : trace.inside) removed[static_cast<std::size_t>(v)] = 1;
  }
  std::vector<int> out;
  for (std::size_t v = 0; v < n; ++v) {
    if (!removed[v]) out.push_back(static_cast<int>(v));
  }
  return out;
}

std::string cluster_set_to_json(const ClusterSet& clusters, const DomainGraph& g) {
  nlohmann::json j;
  auto comps = nlohmann::json::array();
  for (const auto& c : clusters.components) {
    auto verts = nlohmann::json::array();
    for (int v : c.vertices) verts.push_back({g.coord(v).x, g.coord(v).y});
    auto edges = nlohmann::json::array();
    for (int e : c.edges) {
      const auto& ed = g.edges()[static_cast<std::size_t>(e)];
      edges.push_back({{g.coord(ed.a).x, g.coord(ed.a).y}, {g.coord(ed.b).x, g.coord(ed.b).y}});
    }
    comps.push_back({{"vertices", verts}, {"open_edges", edges}});
  }
  j["components"] = comps;
  return j.dump();
}

std::string boundary_trace_to_json(const BoundaryTrace& trace, const DomainGraph& g) {
  nlohmann::json j;
  auto cycle = nlohmann::json::array();
  for (const auto& e : trace.cycle) {
    cycle.push_back({{e.from.x + 0.5, e.from.y + 0.5}, {e.to.x + 0.5, e.to.y + 0.5}});
  }
  auto coords = [&](const std::vector<int>& vs) {
    auto a = nlohmann::json::array();
    for (int v : vs) a.push_back({g.coord(v).x, g.coord(v).y});
    return a;
  };
  j["cycle"] = cycle;
  j["rim"] = coords(trace.rim);
  j["inside"] = coords(trace.inside);
  j["hole"] = coords(trace.hole);
  return j.dump();
}

}  // namespace critsoup
