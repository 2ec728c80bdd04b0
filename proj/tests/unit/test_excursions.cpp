#include <doctest.h>

#include <cmath>

#include "critsoup/excursions.hpp"
#include "critsoup/stats.hpp"

using namespace critsoup;

TEST_SUITE("excursions") {
  TEST_CASE("excursion count is Poisson(rate x boundary conductance)") {
    const DomainGraph g = build_rect_graph(1, 1);
    std::vector<double> counts;
    for (std::size_t r = 0; r < 50000; ++r) {
      RandomStream rng(1, r, Purpose::kExcursions);
      const auto proc = sample_excursions(g, 0.3, rng);
      counts.push_back(static_cast<double>(proc.excursions.size()));
      for (const auto& ex : proc.excursions) {
        CHECK(ex.length() == 1);
        CHECK(ex.from >= 0);
        CHECK(ex.to >= 0);
      }
    }
    CHECK(std::abs(mean_test(counts, 1.2).statistic) < kStdErrorGate);
    CHECK(sample_variance(counts) == doctest::Approx(1.2).epsilon(0.05));
  }

  TEST_CASE("excursion paths are walks from and to the boundary") {
    const DomainGraph g = build_disk_graph(6);
    RandomStream rng(2, 0, Purpose::kExcursions);
    const auto proc = sample_excursions(g, 1.0, rng);
    CHECK(proc.rate == 1.0);
    REQUIRE_FALSE(proc.excursions.empty());
    for (const auto& ex : proc.excursions) {
      REQUIRE(ex.length() >= 1);
      CHECK(ex.holding.size() == ex.length());
      CHECK(g.boundary_conductance(ex.path.front()) > 0.0);
      CHECK(g.boundary_conductance(ex.path.back()) > 0.0);
      for (std::size_t i = 0; i + 1 < ex.length(); ++i) CHECK(g.edge_between(ex.path[i], ex.path[i + 1]) >= 0);
    }
    CHECK_THROWS_AS(sample_excursions(g, -1.0, rng), std::invalid_argument);
  }

  TEST_CASE("excursion local time has mean equal to the rate") {
    const DomainGraph g = build_rect_graph(2, 1);
    std::vector<double> t0, t1;
    for (std::size_t r = 0; r < 50000; ++r) {
      RandomStream rng(3, r, Purpose::kExcursions);
      const auto occ = excursion_occupation(sample_excursions(g, 0.7, rng), g);
      t0.push_back(occ.local_time[0]);
      t1.push_back(occ.recentered()[1]);
    }
    CHECK(std::abs(mean_test(t0, 0.7).statistic) < kStdErrorGate);
    CHECK(std::abs(mean_test(t1, 0.0).statistic) < kStdErrorGate);
  }

  TEST_CASE("discrete rate conversion") { CHECK(discrete_rate(0.25) == doctest::Approx(M_PI / 4.0)); }

  TEST_CASE("splitting a loop at rim visits") {
    // rim = {0, 3}; loop 0 1 2 3 4 (closing back to 0).
    std::vector<char> rim(6, 0);
    rim[0] = rim[3] = 1;
    const RootedLoop loop{{1, 2, 3, 4, 0}, {0.1, 0.2, 0.3, 0.4, 0.5}};
    const auto parts = split_at_rim(loop, rim);
    REQUIRE(parts.size() == 2);
    CHECK(parts[0].from == 3);
    CHECK(parts[0].path == std::vector<int>{4});
    CHECK(parts[0].to == 0);
    CHECK(parts[0].holding == std::vector<double>{0.4});
    CHECK(parts[1].from == 0);
    CHECK(parts[1].path == std::vector<int>{1, 2});
    CHECK(parts[1].to == 3);
    CHECK(split_at_rim({{1, 2}, {}}, rim).empty());
    CHECK(split_at_rim({{0, 3}, {}}, rim).empty());
  }

  TEST_CASE("decomposition around a ring cluster") {
    const DomainGraph g = build_rect_graph(7, 7);
    auto at = [&](int x, int y) { return g.find_interior({x, y}); };
    LoopSoup soup;
    soup.alpha = 0.5;
    // Ring loop around (3,3), an excursion-like loop touching it and a loop
    // entirely outside.
    soup.loops.push_back({{at(2, 2), at(3, 2), at(4, 2), at(4, 3), at(4, 4), at(3, 4), at(2, 4), at(2, 3)}, {}});
    soup.loops.push_back({{at(3, 2), at(3, 3)}, {}});
    soup.loops.push_back({{at(0, 0), at(1, 0)}, {}});
    RandomStream rng(4, 0, Purpose::kOccupation);
    const OccupationField occ = occupation_field(soup, g, rng);
    std::vector<char> open(g.edges().size(), 0);
    for (const auto& loop : soup.loops) {
      for (std::size_t i = 0; i < loop.length(); ++i) {
        open[static_cast<std::size_t>(g.edge_between(loop.at(i), loop.at(i + 1)))] = 1;
      }
    }
    const ClusterSet cl = make_cluster_set(g, open);
    const auto dec = boundary_excursion_decomposition(soup, cl, g, at(3, 3));
    // The centre belongs to the cluster, so no cluster surrounds it.
    CHECK_FALSE(dec.has_value());
    (void)occ;

    // Without the spoke the centre is a hole and forms the domain.
    soup.loops.erase(soup.loops.begin() + 1);
    std::vector<char> open2(g.edges().size(), 0);
    for (const auto& loop : soup.loops) {
      for (std::size_t i = 0; i < loop.length(); ++i) {
        open2[static_cast<std::size_t>(g.edge_between(loop.at(i), loop.at(i + 1)))] = 1;
      }
    }
    const ClusterSet cl2 = make_cluster_set(g, open2);
    const auto dec2 = boundary_excursion_decomposition(soup, cl2, g, at(3, 3));
    REQUIRE(dec2.has_value());
    CHECK(dec2->domain == std::vector<int>{at(3, 3)});
    CHECK(dec2->touching_loops == std::vector<std::size_t>{0});
    CHECK(dec2->interior_loops.empty());
    CHECK(dec2->excursions.empty());
  }

  TEST_CASE("functionals of a fixed excursion list") {
    std::vector<Excursion> ex(2);
    ex[0].path = {0, 1};
    ex[0].holding = {0.5, 0.25};
    ex[1].path = {2};
    ex[1].holding = {1.0};
    const std::vector<char> near{1, 0, 0};
    const auto f = excursion_functionals(ex, {}, near);
    CHECK(f.total_local_time == doctest::Approx(1.75));
    CHECK(f.near_rim_local_time == doctest::Approx(0.5));
    CHECK(f.max_length == 2.0);
    CHECK(f.count == 2.0);
  }
}
