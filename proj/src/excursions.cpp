#include "critsoup/excursions.hpp"

#include <algorithm>
#include <stdexcept>

namespace critsoup {

ExcursionProcess sample_excursions(const DomainGraph& g, double rate, RandomStream& rng) {
  if (!(rate >= 0.0)) throw std::invalid_argument("sample_excursions: rate must be non-negative");
  ExcursionProcess proc;
  proc.rate = rate;
  if (rate == 0.0) return proc;
  for (const auto& be : g.boundary_edges()) {
    const std::uint64_t count = rng.poisson(rate * be.conductance);
    for (std::uint64_t k = 0; k < count; ++k) {
      Excursion ex;
      ex.from = be.boundary;
      int v = be.interior;
      for (;;) {
        ex.path.push_back(v);
        const double kappa = g.kappa(v);
        ex.holding.push_back(rng.exponential() / kappa);
        double u = rng.uniform() * kappa;
        int next = -1;
        for (const auto& nb : g.neighbors(v)) {
          if (u < nb.conductance) {
            next = nb.vertex;
            break;
          }
          u -= nb.conductance;
        }
        if (next >= 0) {
          v = next;
          continue;
        }
        const auto links = g.boundary_links(v);
        if (links.empty()) {
          // Only reachable through rounding in the neighbour scan.
          v = g.neighbors(v).back().vertex;
          continue;
        }
        ex.to = links.back().boundary;
        for (const auto& bl : links) {
          if (u < bl.conductance) {
            ex.to = bl.boundary;
            break;
          }
          u -= bl.conductance;
        }
        break;
      }
      proc.excursions.push_back(std::move(ex));
    }
  }
  return proc;
}

std::vector<double> ExcursionOccupation::recentered() const {
  std::vector<double> out(local_time);
  for (double& x : out) x -= rate;
  return out;
}

ExcursionOccupation excursion_occupation(const ExcursionProcess& proc, const DomainGraph& g) {
  ExcursionOccupation occ;
  occ.rate = proc.rate;
  occ.visits.assign(g.size(), 0);
  occ.local_time.assign(g.size(), 0.0);
  for (const auto& ex : proc.excursions) {
    for (std::size_t i = 0; i < ex.path.size(); ++i) {
      const auto v = static_cast<std::size_t>(ex.path[i]);
      if (v >= g.size()) throw std::invalid_argument("excursion_occupation: vertex outside domain");
      ++occ.visits[v];
      occ.local_time[v] += ex.holding[i];
    }
  }
  return occ;
}

std::vector<Excursion> split_at_rim(const RootedLoop& loop, const std::vector<char>& on_rim) {
  std::vector<Excursion> out;
  const std::size_t l = loop.length();
  std::size_t first = l;
  for (std::size_t i = 0; i < l; ++i) {
    if (on_rim[static_cast<std::size_t>(loop.vertices[i])]) {
      first = i;
      break;
    }
  }
  if (first == l) return out;
  const bool timed = loop.holding.size() == l;
  // Walk once around the cycle starting at the first rim visit.
  Excursion current;
  current.from = loop.vertices[first];
  for (std::size_t step = 1; step <= l; ++step) {
    const std::size_t i = (first + step) % l;
    const int v = loop.vertices[i];
    if (on_rim[static_cast<std::size_t>(v)]) {
      if (!current.path.empty()) {
        current.to = v;
        out.push_back(std::move(current));
      }
      current = Excursion{};
      current.from = v;
    } else {
      current.path.push_back(v);
      current.holding.push_back(timed ? loop.holding[i] : 0.0);
    }
  }
  return out;
}

std::optional<Decomposition> boundary_excursion_decomposition(const LoopSoup& soup, const ClusterSet& clusters,
                                                              const DomainGraph& g, int v0) {
  const auto component = outermost_cluster_around(clusters, g, v0);
  if (!component) return std::nullopt;
  Decomposition dec;
  dec.component = *component;
  dec.trace = outer_boundary(clusters.components[static_cast<std::size_t>(*component)], g);

  const std::size_t n = g.size();
  std::vector<char> on_rim(n, 0);
  std::vector<char> in_domain(n, 0);
  for (int v : dec.trace.inside) in_domain[static_cast<std::size_t>(v)] = 1;
  for (int v : dec.trace.rim) {
    on_rim[static_cast<std::size_t>(v)] = 1;
    in_domain[static_cast<std::size_t>(v)] = 0;
  }
  for (std::size_t v = 0; v < n; ++v) {
    if (in_domain[v]) dec.domain.push_back(static_cast<int>(v));
  }

  for (std::size_t k = 0; k < soup.loops.size(); ++k) {
    const auto& loop = soup.loops[k];
    bool touches = false;
    bool contained = true;
    for (int v : loop.vertices) {
      touches = touches || on_rim[static_cast<std::size_t>(v)];
      contained = contained && in_domain[static_cast<std::size_t>(v)];
    }
    if (contained) {
      dec.interior_loops.push_back(k);
    } else if (touches) {
      dec.touching_loops.push_back(k);
      for (auto& ex : split_at_rim(loop, on_rim)) dec.excursions.push_back(std::move(ex));
    }
  }
  return dec;
}

ExcursionFunctionals excursion_functionals(const std::vector<Excursion>& excursions, const std::vector<int>& local,
                                           const std::vector<char>& near_rim) {
  ExcursionFunctionals f;
  for (const auto& ex : excursions) {
    f.count += 1.0;
    f.max_length = std::max(f.max_length, static_cast<double>(ex.length()));
    for (std::size_t i = 0; i < ex.path.size(); ++i) {
      const int d = local.empty() ? ex.path[i] : local[static_cast<std::size_t>(ex.path[i])];
      if (d < 0) throw std::invalid_argument("excursion_functionals: vertex outside the domain");
      const double t = ex.holding[i];
      f.total_local_time += t;
      if (near_rim[static_cast<std::size_t>(d)]) f.near_rim_local_time += t;
    }
  }
  return f;
}

}  // namespace critsoup
