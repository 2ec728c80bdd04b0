#include "critsoup/loopsoup.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include <Eigen/Eigenvalues>

namespace critsoup {
namespace {

// Caps on dense scratch, in doubles.
constexpr std::size_t kRootTableBudget = 4'000'000;
constexpr std::size_t kBridgeBudget = 2'000'000;
constexpr int kHardLengthCap = 1'000'000;

Eigen::MatrixXd transition_matrix(const DomainGraph& g) {
  const auto n = static_cast<Eigen::Index>(g.size());
  Eigen::MatrixXd P = Eigen::MatrixXd::Zero(n, n);
  for (int v = 0; v < static_cast<int>(n); ++v) {
    for (const auto& nb : g.neighbors(v)) P(v, nb.vertex) = nb.conductance / g.kappa(v);
  }
  return P;
}

std::size_t draw_from_cdf(const double* cdf, std::size_t count, double u) {
  const double target = u * cdf[count - 1];
  auto idx = static_cast<std::size_t>(std::upper_bound(cdf, cdf + count, target) - cdf);
  if (idx < count) return idx;
  // Rounding pushed the target onto the total: take the last entry with weight.
  idx = count - 1;
  while (idx > 0 && cdf[idx] == cdf[idx - 1]) --idx;
  return idx;
}

}  // namespace

bool is_valid_loop(const RootedLoop& loop, const DomainGraph& g) {
  const std::size_t l = loop.length();
  if (l < 2) return false;
  for (std::size_t i = 0; i < l; ++i) {
    const int a = loop.vertices[i];
    const int b = loop.vertices[(i + 1) % l];
    if (a < 0 || b < 0 || static_cast<std::size_t>(a) >= g.size() || static_cast<std::size_t>(b) >= g.size()) {
      return false;
    }
    if (g.edge_between(a, b) < 0) return false;
  }
  return loop.holding.empty() || loop.holding.size() == l;
}

double loop_mass(const DomainGraph& g, int length) {
  if (length < 2) throw std::invalid_argument("loop_mass: length must be >= 2");
  if (g.size() == 0) return 0.0;
  Eigen::MatrixXd base = transition_matrix(g);
  Eigen::MatrixXd acc = Eigen::MatrixXd::Identity(base.rows(), base.cols());
  for (int e = length; e > 0; e >>= 1) {
    if (e & 1) acc = (acc * base).eval();
    if (e > 1) base = (base * base).eval();
  }
  return acc.trace() / length;
}

LoopSoupSampler::LoopSoupSampler(DomainGraph g, int l_max, double tail_tolerance)
    : g_(std::move(g)), bipartite_(g_.is_bipartite()) {
  if (!(tail_tolerance > 0.0)) throw std::invalid_argument("LoopSoupSampler: tail tolerance must be positive");
  if (l_max != 0 && l_max < 2) throw std::invalid_argument("LoopSoupSampler: L_max must be >= 2");
  const auto n = static_cast<Eigen::Index>(g_.size());

  Eigen::MatrixXd S = Eigen::MatrixXd::Zero(n, n);
  for (int v = 0; v < static_cast<int>(n); ++v) {
    for (const auto& nb : g_.neighbors(v)) {
      S(v, nb.vertex) = nb.conductance / std::sqrt(g_.kappa(v) * g_.kappa(nb.vertex));
    }
  }
  if (n > 0) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(S);
    if (eig.info() != Eigen::Success) throw std::runtime_error("LoopSoupSampler: eigendecomposition failed");
    eigenvalues_ = eig.eigenvalues();
    eigenvectors_ = eig.eigenvectors();
  }

  // Full mass sum_{l>=2} tr(P^l)/l = sum_k -log(1 - lambda_k) - lambda_k.
  double full = 0.0;
  for (Eigen::Index k = 0; k < n; ++k) {
    const double lam = eigenvalues_(k);
    if (!(std::abs(lam) < 1.0)) throw std::runtime_error("LoopSoupSampler: spectral radius of P is not below 1");
    full += -std::log1p(-lam) - lam;
  }
  full = std::max(full, 0.0);

  mass_.assign(3, 0.0);
  std::vector<double> power(eigenvalues_.data(), eigenvalues_.data() + n);
  double partial = 0.0;
  int length = 1;
  const int target = l_max > 0 ? l_max : kHardLengthCap;
  while (length < target) {
    ++length;
    double trace = 0.0;
    for (Eigen::Index k = 0; k < n; ++k) {
      power[static_cast<std::size_t>(k)] *= eigenvalues_(k);
      trace += power[static_cast<std::size_t>(k)];
    }
    double m = trace / length;
    if ((bipartite_ && (length % 2 == 1)) || m < 0.0) m = 0.0;
    if (static_cast<std::size_t>(length) >= mass_.size()) mass_.resize(static_cast<std::size_t>(length) + 1, 0.0);
    mass_[static_cast<std::size_t>(length)] = m;
    partial += m;
    if (l_max <= 0 && full - partial < tail_tolerance) break;
  }
  if (l_max <= 0 && full - partial >= tail_tolerance) {
    throw std::runtime_error("LoopSoupSampler: tail tolerance not reached below the hard length cap");
  }
  l_max_ = length;
  mass_.resize(static_cast<std::size_t>(l_max_) + 1, 0.0);
  tail_mass_ = std::max(full - partial, 0.0);
  total_mass_ = partial;

  mass_cdf_.assign(static_cast<std::size_t>(l_max_ - 1), 0.0);
  double run = 0.0;
  for (int l = 2; l <= l_max_; ++l) {
    run += mass_[static_cast<std::size_t>(l)];
    mass_cdf_[static_cast<std::size_t>(l - 2)] = run;
  }

  // Cumulative root weights diag(S^l) for short lengths.
  if (n > 0) {
    const auto per_length = static_cast<std::size_t>(n);
    const std::size_t fit = std::max<std::size_t>(1, kRootTableBudget / per_length);
    root_table_max_ = static_cast<int>(std::min<std::size_t>(static_cast<std::size_t>(l_max_), fit + 1));
    if (root_table_max_ >= 2) {
      const Eigen::Index cols = root_table_max_ - 1;
      Eigen::MatrixXd pow_table(n, cols);
      for (Eigen::Index k = 0; k < n; ++k) {
        double p = eigenvalues_(k);
        for (Eigen::Index c = 0; c < cols; ++c) {
          p *= eigenvalues_(k);
          pow_table(k, c) = p;
        }
      }
      const Eigen::MatrixXd squares = eigenvectors_.cwiseAbs2();
      Eigen::MatrixXd diag = squares * pow_table;
      root_cdf_.assign(static_cast<std::size_t>(n * cols), 0.0);
      for (Eigen::Index c = 0; c < cols; ++c) {
        double acc = 0.0;
        const int len = static_cast<int>(c) + 2;
        const bool zero_column = bipartite_ && (len % 2 == 1);
        for (Eigen::Index v = 0; v < n; ++v) {
          double w = diag(v, c);
          if (zero_column || w < 0.0 || g_.neighbors(static_cast<int>(v)).empty()) w = 0.0;
          acc += w;
          root_cdf_[static_cast<std::size_t>(c * n + v)] = acc;
        }
      }
    }
  }
}

double LoopSoupSampler::mass(int length) const {
  if (length < 2 || length > l_max_) return 0.0;
  return mass_[static_cast<std::size_t>(length)];
}

int LoopSoupSampler::sample_root(int length, RandomStream& rng) const {
  const auto n = static_cast<std::size_t>(g_.size());
  if (length < 2 || n == 0) throw std::invalid_argument("sample_root: bad length");
  if (length <= root_table_max_) {
    const double* col = root_cdf_.data() + static_cast<std::size_t>(length - 2) * n;
    if (!(col[n - 1] > 0.0)) throw std::logic_error("sample_root: no closed walks of this length");
    return static_cast<int>(draw_from_cdf(col, n, rng.uniform()));
  }
  std::vector<double> cdf(n);
  const double u = rng.uniform();
  if (length % 2 == 0) {
    // Spectral mixture: pick an eigenvector with weight lambda_k^l, then a
    // vertex with weight V_vk^2.
    double acc = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
      acc += std::pow(eigenvalues_(static_cast<Eigen::Index>(k)), length);
      cdf[k] = acc;
    }
    if (!(acc > 0.0)) throw std::logic_error("sample_root: no closed walks of this length");
    const auto k = static_cast<Eigen::Index>(draw_from_cdf(cdf.data(), n, u));
    acc = 0.0;
    for (std::size_t v = 0; v < n; ++v) {
      const double x = eigenvectors_(static_cast<Eigen::Index>(v), k);
      acc += x * x;
      cdf[v] = acc;
    }
    return static_cast<int>(draw_from_cdf(cdf.data(), n, rng.uniform()));
  }
  double acc = 0.0;
  for (std::size_t v = 0; v < n; ++v) {
    double w = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
      const double x = eigenvectors_(static_cast<Eigen::Index>(v), static_cast<Eigen::Index>(k));
      w += x * x * std::pow(eigenvalues_(static_cast<Eigen::Index>(k)), length);
    }
    acc += std::max(w, 0.0);
    cdf[v] = acc;
  }
  if (!(acc > 0.0)) throw std::logic_error("sample_root: no closed walks of this length");
  return static_cast<int>(draw_from_cdf(cdf.data(), n, u));
}

std::vector<int> LoopSoupSampler::sample_bridge(int v0, int length, RandomStream& rng) const {
  if (length < 2) throw std::invalid_argument("sample_bridge: length must be >= 2");
  const std::size_t n = g_.size();

  // Short loops: propose the first length-1 steps of the killed walk from v0
  // and accept with probability P(v_{l-1}, v0) / max_w P(w, v0). The accepted
  // path has law proportional to the product of its transition
  // probabilities. Used when the expected proposal cost, l * max P / P^l(v0,v0),
  // beats the cost of the ball vectors.
  if (length <= root_table_max_) {
    const std::size_t col = static_cast<std::size_t>(length - 2) * n;
    const auto vi = static_cast<std::size_t>(v0);
    const double diag = root_cdf_[col + vi] - (vi > 0 ? root_cdf_[col + vi - 1] : 0.0);
    double pmax = 0.0;
    for (const auto& nb : g_.neighbors(v0)) pmax = std::max(pmax, nb.conductance / g_.kappa(nb.vertex));
    const double len = static_cast<double>(length);
    const double ball_cost = 4.0 * len * std::min(len * len / 6.0 + 1.0, static_cast<double>(n));
    if (diag > 0.0 && pmax > 0.0 && len * pmax / diag < ball_cost) {
      std::vector<int> out(static_cast<std::size_t>(length));
      for (;;) {
        out[0] = v0;
        int v = v0;
        bool alive = true;
        for (int i = 1; i < length && alive; ++i) {
          double u = rng.uniform() * g_.kappa(v);
          int next = -1;
          for (const auto& nb : g_.neighbors(v)) {
            if (u < nb.conductance) {
              next = nb.vertex;
              break;
            }
            u -= nb.conductance;
          }
          if (next < 0) {
            alive = false;
          } else {
            out[static_cast<std::size_t>(i)] = next;
            v = next;
          }
        }
        if (!alive) continue;
        const int e = g_.edge_between(v, v0);
        if (e < 0) continue;
        const double p_close = g_.edges()[static_cast<std::size_t>(e)].conductance / g_.kappa(v);
        if (rng.uniform() * pmax < p_close) return out;
      }
    }
  }

  // Ball of radius floor(length/2) around v0 in BFS order.
  thread_local std::vector<int> pos;
  if (pos.size() < n) pos.assign(n, -1);
  const int depth_cap = length / 2;
  std::vector<int> order{v0};
  std::vector<std::size_t> upto;  // upto[d] = #vertices at distance <= d
  pos[static_cast<std::size_t>(v0)] = 0;
  {
    std::size_t level_begin = 0;
    for (int d = 0;; ++d) {
      const std::size_t level_end = order.size();
      upto.push_back(level_end);
      if (d == depth_cap || level_begin == level_end) break;
      for (std::size_t i = level_begin; i < level_end; ++i) {
        for (const auto& nb : g_.neighbors(order[i])) {
          auto& p = pos[static_cast<std::size_t>(nb.vertex)];
          if (p < 0) {
            p = static_cast<int>(order.size());
            order.push_back(nb.vertex);
          }
        }
      }
      level_begin = level_end;
    }
  }
  const int max_depth = static_cast<int>(upto.size()) - 1;
  auto support = [&](int j) {
    const int r = std::min({j, length - j, max_depth});
    return upto[static_cast<std::size_t>(r)];
  };

  auto advance = [&](const std::vector<double>& h, int j, std::vector<double>& next) {
    const std::size_t s_next = support(j + 1);
    const std::size_t s_cur = support(j);
    next.assign(s_next, 0.0);
    double top = 0.0;
    for (std::size_t p = 0; p < s_next; ++p) {
      const int w = order[p];
      double acc = 0.0;
      for (const auto& nb : g_.neighbors(w)) {
        const int q = pos[static_cast<std::size_t>(nb.vertex)];
        if (q >= 0 && static_cast<std::size_t>(q) < s_cur) acc += nb.conductance * h[static_cast<std::size_t>(q)];
      }
      acc /= g_.kappa(w);
      next[p] = acc;
      top = std::max(top, acc);
    }
    if (top > 0.0) {
      for (double& x : next) x /= top;
    }
  };

  std::size_t full_storage = 0;
  for (int j = 0; j < length; ++j) full_storage += support(j);
  const int block = full_storage <= kBridgeBudget
                        ? length
                        : static_cast<int>(std::ceil(std::sqrt(static_cast<double>(length))));

  // Forward pass: keep h_j for every j that starts a block.
  std::vector<std::vector<double>> checkpoints;
  std::vector<std::vector<double>> cache(static_cast<std::size_t>(block));
  {
    std::vector<double> h{1.0};
    std::vector<double> next;
    for (int j = 0; j < length; ++j) {
      if (j % block == 0) checkpoints.push_back(h);
      if (block == length) cache[static_cast<std::size_t>(j)] = h;
      if (j + 1 < length) {
        advance(h, j, next);
        h.swap(next);
      }
    }
  }

  std::vector<int> out(static_cast<std::size_t>(length));
  out[0] = v0;
  int loaded_block = block == length ? 0 : -1;
  std::vector<double> weights;
  int v = v0;
  for (int i = 0; i + 1 < length; ++i) {
    const int j = length - i - 1;
    const int b = j / block;
    if (b != loaded_block) {
      const int first = b * block;
      const int last = std::min(first + block, length) - 1;
      cache[0] = checkpoints[static_cast<std::size_t>(b)];
      for (int jj = first; jj < last; ++jj) {
        advance(cache[static_cast<std::size_t>(jj - first)], jj, cache[static_cast<std::size_t>(jj - first + 1)]);
      }
      loaded_block = b;
    }
    const auto& h = cache[static_cast<std::size_t>(j - b * block)];
    const auto nbrs = g_.neighbors(v);
    weights.assign(nbrs.size(), 0.0);
    double acc = 0.0;
    for (std::size_t t = 0; t < nbrs.size(); ++t) {
      const int q = pos[static_cast<std::size_t>(nbrs[t].vertex)];
      if (q >= 0 && static_cast<std::size_t>(q) < h.size()) acc += nbrs[t].conductance * h[static_cast<std::size_t>(q)];
      weights[t] = acc;
    }
    if (!(acc > 0.0)) {
      for (int u : order) pos[static_cast<std::size_t>(u)] = -1;
      throw std::logic_error("sample_bridge: dead end while filling the bridge");
    }
    v = nbrs[draw_from_cdf(weights.data(), weights.size(), rng.uniform())].vertex;
    out[static_cast<std::size_t>(i + 1)] = v;
  }
  for (int u : order) pos[static_cast<std::size_t>(u)] = -1;
  return out;
}

LoopSoup LoopSoupSampler::sample(double alpha, RandomStream& rng) const {
  if (!(alpha >= 0.0)) throw std::invalid_argument("sample_loop_soup: alpha must be non-negative");
  LoopSoup soup;
  soup.alpha = alpha;
  soup.l_max = l_max_;
  soup.tail_mass = tail_mass_;
  if (total_mass_ <= 0.0 || alpha == 0.0) return soup;
  const std::uint64_t count = rng.poisson(alpha * total_mass_);
  soup.loops.reserve(count);
  for (std::uint64_t i = 0; i < count; ++i) {
    const int length = static_cast<int>(draw_from_cdf(mass_cdf_.data(), mass_cdf_.size(), rng.uniform())) + 2;
    const int root = sample_root(length, rng);
    soup.loops.push_back(RootedLoop{sample_bridge(root, length, rng), {}});
  }
  return soup;
}

LoopSoup sample_loop_soup(const DomainGraph& g, double alpha, int l_max, RandomStream& rng) {
  if (l_max < 2) throw std::invalid_argument("sample_loop_soup: L_max must be >= 2");
  return LoopSoupSampler(g, l_max).sample(alpha, rng);
}

OccupationField occupation_field(LoopSoup& soup, const DomainGraph& g, RandomStream& rng) {
  const std::size_t n = g.size();
  OccupationField occ;
  occ.alpha = soup.alpha;
  occ.visits.assign(n, 0);
  occ.trivial.assign(n, 0.0);
  for (std::size_t x = 0; x < n; ++x) {
    const double kappa = g.kappa(static_cast<int>(x));
    occ.trivial[x] = soup.alpha > 0.0 ? rng.gamma(soup.alpha) / kappa : 0.0;
  }
  occ.local_time = occ.trivial;
  for (auto& loop : soup.loops) {
    loop.holding.resize(loop.length());
    for (std::size_t i = 0; i < loop.length(); ++i) {
      const auto x = static_cast<std::size_t>(loop.vertices[i]);
      if (x >= n) throw std::invalid_argument("occupation_field: loop vertex outside graph");
      const double t = rng.exponential() / g.kappa(loop.vertices[i]);
      loop.holding[i] = t;
      occ.local_time[x] += t;
      ++occ.visits[x];
    }
  }
  return occ;
}

ScalarField recentered_occupation(const OccupationField& occ, const GreenMatrix& G, double alpha) {
  if (occ.size() != G.size()) throw std::invalid_argument("recentered_occupation: size mismatch");
  ScalarField out{FieldRole::kOccupation, occ.local_time};
  for (std::size_t x = 0; x < out.size(); ++x) {
    const int i = static_cast<int>(x);
    out[x] -= alpha * G(i, i);
  }
  return out;
}

void write_soup_text(std::ostream& out, const LoopSoup& soup) {
  for (const auto& loop : soup.loops) {
    out << loop.length();
    for (int v : loop.vertices) out << ' ' << v;
    out << '\n';
  }
}

LoopSoup read_soup_text(std::istream& in, double alpha) {
  LoopSoup soup;
  soup.alpha = alpha;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::istringstream ls(line);
    std::size_t length = 0;
    if (!(ls >> length)) throw std::runtime_error("read_soup_text: malformed line");
    RootedLoop loop;
    loop.vertices.resize(length);
    for (auto& v : loop.vertices) {
      if (!(ls >> v)) throw std::runtime_error("read_soup_text: truncated loop");
    }
    soup.l_max = std::max(soup.l_max, static_cast<int>(length));
    soup.loops.push_back(std::move(loop));
  }
  return soup;
}

}  // namespace critsoup
