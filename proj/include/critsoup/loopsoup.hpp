#pragma once

#include <cstdint>
#include <iosfwd>
#include <vector>

#include <Eigen/Dense>

#include "critsoup/gff.hpp"
#include "critsoup/grid.hpp"
#include "critsoup/random.hpp"

namespace critsoup {

/// Discrete intensity corresponding to the continuum central charge c.
inline constexpr double kAlphaPerC = 0.5;
inline constexpr double alpha_from_c(double c) { return kAlphaPerC * c; }
inline constexpr double c_from_alpha(double alpha) { return alpha / kAlphaPerC; }

/// Default truncated tail mass used to pick the length cutoff.
inline constexpr double kDefaultTailTolerance = 1e-6;

/// Closed nearest-neighbour walk v_0 -> v_1 -> ... -> v_{l-1} -> v_0. The
/// closing step back to v_0 is implicit, so `vertices` holds l entries.
/// `holding` is empty until occupation_field() attaches one Exp(1)/kappa
/// holding time per visit.
struct RootedLoop {
  std::vector<int> vertices;
  std::vector<double> holding;

  std::size_t length() const { return vertices.size(); }
  int at(std::size_t i) const { return vertices[i % vertices.size()]; }
};

/// Realized soup. Loops are stored in sampling order; lengths never exceed
/// l_max.
struct LoopSoup {
  double alpha = 0.0;
  int l_max = 0;
  double tail_mass = 0.0;
  std::vector<RootedLoop> loops;
};

/// True iff the loop is closed, has length >= 2 and every step is an edge.
bool is_valid_loop(const RootedLoop& loop, const DomainGraph& g);

/// tr(P^length)/length computed with dense matrix powers. Intended for small
/// graphs and oracles.
double loop_mass(const DomainGraph& g, int length);

/// Precomputed loop soup sampler for one graph.
///
/// Traces tr(P^l) come from the spectrum of the symmetrized transition
/// matrix S = K^{-1/2} C K^{-1/2}. Roots are drawn from diag(S^l) (equal to
/// diag(P^l)), read from a cumulative table for short lengths and from the
/// spectral mixture otherwise. Bridges are filled step by step from the
/// vectors P^j e_{v0}, computed on the graph ball that the remaining walk can
/// still reach, with checkpointing when they would not fit in memory.
class LoopSoupSampler {
 public:
  /// l_max <= 0 selects the smallest cutoff with truncated tail mass below
  /// tail_tolerance.
  explicit LoopSoupSampler(DomainGraph g, int l_max = 0, double tail_tolerance = kDefaultTailTolerance);

  const DomainGraph& graph() const { return g_; }
  int l_max() const { return l_max_; }
  /// sum over l > l_max of tr(P^l)/l.
  double tail_mass() const { return tail_mass_; }
  /// tr(P^l)/l for 2 <= l <= l_max, zero otherwise.
  double mass(int length) const;
  /// sum over 2 <= l <= l_max of tr(P^l)/l.
  double total_mass() const { return total_mass_; }
  const Eigen::VectorXd& eigenvalues() const { return eigenvalues_; }

  LoopSoup sample(double alpha, RandomStream& rng) const;

  /// Samples the vertices of one loop of the given length rooted at v0.
  /// Exposed for tests.
  std::vector<int> sample_bridge(int v0, int length, RandomStream& rng) const;
  int sample_root(int length, RandomStream& rng) const;

 private:
  DomainGraph g_;
  bool bipartite_ = false;
  int l_max_ = 0;
  double tail_mass_ = 0.0;
  double total_mass_ = 0.0;
  Eigen::VectorXd eigenvalues_;
  Eigen::MatrixXd eigenvectors_;
  std::vector<double> mass_;       // index l
  std::vector<double> mass_cdf_;   // cumulative over l = 2..l_max
  int root_table_max_ = 0;         // lengths <= this use root_cdf_
  std::vector<double> root_cdf_;   // (length - 2) * n + v, cumulative in v
};

/// Convenience wrapper: builds a sampler and draws one soup.
LoopSoup sample_loop_soup(const DomainGraph& g, double alpha, int l_max, RandomStream& rng);

/// Visit counts and continuous local times of a soup plus its trivial loops.
/// local_time[x] = trivial[x] + sum of holding times at x, which is
/// Gamma(visits[x] + alpha)/kappa_x.
struct OccupationField {
  double alpha = 0.0;
  std::vector<std::uint64_t> visits;
  std::vector<double> local_time;
  std::vector<double> trivial;

  std::size_t size() const { return local_time.size(); }
};

/// Attaches Exp(1)/kappa holding times to every loop of `soup` and adds an
/// independent Gamma(alpha)/kappa trivial-loop term per vertex.
OccupationField occupation_field(LoopSoup& soup, const DomainGraph& g, RandomStream& rng);

/// local_time(x) - alpha G(x,x).
ScalarField recentered_occupation(const OccupationField& occ, const GreenMatrix& G, double alpha);

/// One loop per line: "length v_0 ... v_{l-1}".
void write_soup_text(std::ostream& out, const LoopSoup& soup);
LoopSoup read_soup_text(std::istream& in, double alpha);

}  // namespace critsoup
