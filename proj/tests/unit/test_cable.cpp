#include <doctest.h>

#include <algorithm>

#include "critsoup/cable.hpp"
#include "critsoup/gff.hpp"

using namespace critsoup;

namespace {

// Open edges along the square ring |x - c|, |y - c| <= h with max = h.
ClusterSet ring_clusters(const DomainGraph& g, std::vector<std::pair<int, int>> rings, int c) {
  std::vector<char> open(g.edges().size(), 0);
  for (const auto& [h, unused] : rings) {
    (void)unused;
    for (std::size_t e = 0; e < g.edges().size(); ++e) {
      const Coord a = g.coord(g.edges()[e].a);
      const Coord b = g.coord(g.edges()[e].b);
      auto on = [&](Coord p) { return std::max(std::abs(p.x - c), std::abs(p.y - c)) == h; };
      if (on(a) && on(b)) open[e] = 1;
    }
  }
  return make_cluster_set(g, open);
}

}  // namespace

TEST_SUITE("cable") {
  TEST_CASE("ring cluster boundary") {
    const DomainGraph g = build_rect_graph(7, 7);
    const ClusterSet cl = ring_clusters(g, {{1, 0}}, 3);
    const int centre = g.find_interior({3, 3});
    const int k = cl.label[static_cast<std::size_t>(g.find_interior({2, 2}))];
    REQUIRE(cl.components[static_cast<std::size_t>(k)].vertices.size() == 8);
    CHECK(cl.open_count() == 8);
    CHECK(cl.largest_size() == 8);
    const BoundaryTrace t = outer_boundary(cl.components[static_cast<std::size_t>(k)], g);
    CHECK(t.cycle.size() == 12);
    CHECK(t.is_simple());
    CHECK(t.rim.size() == 8);
    CHECK(t.inside.size() == 9);
    REQUIRE(t.hole.size() == 1);
    CHECK(t.hole[0] == centre);
    CHECK(t.winding({3, 3}) == 1);
    CHECK(t.encloses({3, 3}));
    CHECK_FALSE(t.encloses({0, 0}));
    CHECK(outermost_cluster_around(cl, g, centre) == k);
  }

  TEST_CASE("nested rings choose the outer one") {
    const DomainGraph g = build_rect_graph(9, 9);
    const ClusterSet cl = ring_clusters(g, {{1, 0}, {3, 0}}, 4);
    const int centre = g.find_interior({4, 4});
    const int outer = cl.label[static_cast<std::size_t>(g.find_interior({1, 1}))];
    const int inner = cl.label[static_cast<std::size_t>(g.find_interior({3, 3}))];
    REQUIRE(outer != inner);
    CHECK(outermost_cluster_around(cl, g, centre) == outer);
    const BoundaryTrace t = outer_boundary(cl.components[static_cast<std::size_t>(outer)], g);
    CHECK(t.inside.size() == 49);
    CHECK(t.hole.size() == 25);
    CHECK(t.cycle.size() == 28);
    // Exploring from the outer ring removes everything it encloses.
    const std::vector<int> A{g.find_interior({1, 1})};
    const auto rest = explore_clusters_touching(cl, g, A);
    CHECK(std::find(rest.begin(), rest.end(), centre) == rest.end());
    CHECK(std::find(rest.begin(), rest.end(), A[0]) == rest.end());
    CHECK(rest.size() == g.size() - 49);
    const std::vector<int> corner{g.find_interior({0, 0})};
    CHECK(explore_clusters_touching(cl, g, corner).size() == g.size() - 1);
  }

  TEST_CASE("non-enclosing cluster is not outermost") {
    const DomainGraph g = build_rect_graph(5, 5);
    std::vector<char> open(g.edges().size(), 0);
    open[static_cast<std::size_t>(g.edge_between(g.find_interior({0, 0}), g.find_interior({1, 0})))] = 1;
    const ClusterSet cl = make_cluster_set(g, open);
    CHECK_FALSE(outermost_cluster_around(cl, g, g.find_interior({2, 2})).has_value());
    CHECK_THROWS_AS(make_cluster_set(g, {}), std::invalid_argument);
  }

  TEST_CASE("gff clusters respect signs") {
    const DomainGraph g = build_disk_graph(6);
    const GreenMatrix G = green_function(g);
    RandomStream rng(1, 0, Purpose::kGff);
    const ScalarField phi = sample_gff(g, G, rng);
    const ClusterSet cl = clusters_from_gff(phi, g, rng);
    for (std::size_t e = 0; e < g.edges().size(); ++e) {
      if (cl.open[e]) {
        CHECK(phi[static_cast<std::size_t>(g.edges()[e].a)] * phi[static_cast<std::size_t>(g.edges()[e].b)] > 0.0);
      }
    }
    std::size_t total = 0;
    for (const auto& c : cl.components) total += c.vertices.size();
    CHECK(total == g.size());
  }

  TEST_CASE("soup clusters contain every loop and the sign coupling needs alpha 1/2") {
    const DomainGraph g = build_disk_graph(5);
    const LoopSoupSampler s(g);
    RandomStream rng(2, 0, Purpose::kSoup);
    LoopSoup soup = s.sample(0.5, rng);
    const OccupationField occ = occupation_field(soup, g, rng);
    const ClusterSet cl = clusters_from_soup(soup, occ, g, rng);
    for (const auto& loop : soup.loops) {
      for (int v : loop.vertices) CHECK(cl.label[static_cast<std::size_t>(v)] == cl.label[static_cast<std::size_t>(loop.vertices[0])]);
    }
    const ScalarField phi = gff_from_soup(occ, cl, rng);
    for (std::size_t x = 0; x < phi.size(); ++x) CHECK(phi[x] * phi[x] / 2.0 == doctest::Approx(occ.local_time[x]));

    LoopSoup other = s.sample(1.0, rng);
    const OccupationField occ1 = occupation_field(other, g, rng);
    const ClusterSet cl1 = clusters_from_soup(other, occ1, g, rng);
    CHECK_THROWS_AS(gff_from_soup(occ1, cl1, rng), std::invalid_argument);
  }
}
