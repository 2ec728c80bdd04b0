#include <doctest.h>

#include <algorithm>

#include "critsoup/grid.hpp"

using namespace critsoup;

TEST_SUITE("grid") {
  TEST_CASE("single vertex has G = 1/4") {
    const DomainGraph g = build_rect_graph(1, 1);
    REQUIRE(g.size() == 1);
    CHECK(g.boundary_size() == 4);
    CHECK(g.kappa(0) == 4.0);
    const GreenMatrix G = green_function(g);
    CHECK(G(0, 0) == doctest::Approx(0.25).epsilon(1e-15));
  }

  TEST_CASE("2x1 rectangle has G = (1/15)[[4,1],[1,4]]") {
    const DomainGraph g = build_rect_graph(2, 1);
    const GreenMatrix G = green_function(g);
    CHECK(G(0, 0) == doctest::Approx(4.0 / 15.0).epsilon(1e-14));
    CHECK(G(1, 1) == doctest::Approx(4.0 / 15.0).epsilon(1e-14));
    CHECK(G(0, 1) == doctest::Approx(1.0 / 15.0).epsilon(1e-14));
    CHECK(G(1, 0) == G(0, 1));
  }

  TEST_CASE("disk and rectangle counts") {
    CHECK(build_disk_graph(2).size() == 9);
    CHECK(build_disk_graph(1).size() == 1);
    const DomainGraph r = build_rect_graph(3, 3);
    CHECK(r.size() == 9);
    CHECK(r.edges().size() == 12);
    CHECK(r.boundary_size() == 12);
    CHECK(r.boundary_edges().size() == 12);
    CHECK(r.is_bipartite());
    CHECK_THROWS_AS(build_disk_graph(0), std::invalid_argument);
    CHECK_THROWS_AS(build_rect_graph(0, 3), std::invalid_argument);
  }

  TEST_CASE("disk laplacian and killing residuals up to radius 16") {
    for (int r : {2, 4, 8, 16}) {
      const DomainGraph g = build_disk_graph(r);
      const GreenMatrix G = green_function(g);
      CHECK(laplacian_residual(g, G) < 1e-10);
      CHECK(killing_residual(g, G) < 1e-10);
    }
  }

  TEST_CASE("neighbours and edges are consistent") {
    const DomainGraph g = build_disk_graph(5);
    double total = 0.0;
    for (int v = 0; v < static_cast<int>(g.size()); ++v) {
      double k = g.boundary_conductance(v);
      for (const auto& nb : g.neighbors(v)) {
        k += nb.conductance;
        CHECK(g.edge_between(v, nb.vertex) == nb.edge);
      }
      CHECK(k == doctest::Approx(g.kappa(v)));
      CHECK(g.find_interior(g.coord(v)) == v);
      total += g.kappa(v);
    }
    CHECK(total == doctest::Approx(4.0 * static_cast<double>(g.size())));
    CHECK(g.find_interior({100, 100}) == -1);
  }

  TEST_CASE("invalid graphs are rejected") {
    CHECK_THROWS_AS(DomainGraph({{0, 0}}, {}, {}, {}), std::invalid_argument);
    CHECK_THROWS_AS(DomainGraph({{0, 0}, {0, 0}}, {{1, 0}}, {}, {{0, 0, 1.0}}), std::invalid_argument);
    CHECK_THROWS_AS(DomainGraph({{0, 0}}, {{1, 0}}, {}, {{0, 0, -1.0}}), std::invalid_argument);
    CHECK_THROWS_AS(DomainGraph({{0, 0}}, {{0, 0}}, {}, {{0, 0, 1.0}}), std::invalid_argument);
  }

  TEST_CASE("restriction and subdomain Green functions agree") {
    const DomainGraph g = build_rect_graph(3, 3);
    const int centre = g.find_interior({1, 1});
    const std::vector<int> one{centre};
    const DomainGraph sub = g.restrict_to(one);
    REQUIRE(sub.size() == 1);
    CHECK(sub.boundary_size() == 4);
    CHECK(green_function(sub)(0, 0) == doctest::Approx(0.25));

    const DomainGraph d = build_disk_graph(6);
    std::vector<int> subset;
    for (int v = 0; v < static_cast<int>(d.size()); ++v) {
      if (d.coord(v).x >= -1) subset.push_back(v);
    }
    const GreenMatrix Gs = green_function_on_subdomain(d, subset);
    const GreenMatrix Gr = green_function(d.restrict_to(subset));
    CHECK((Gs.values - Gr.values).cwiseAbs().maxCoeff() < 1e-12);
    const Eigen::VectorXd col = green_column_on_subdomain(d, subset, 3);
    CHECK((col - Gs.values.col(3)).cwiseAbs().maxCoeff() < 1e-10);
    CHECK(green_function_on_subdomain(d, {}).size() == 0);
  }

  TEST_CASE("json round trip") {
    const DomainGraph g = build_disk_graph(4);
    const DomainGraph h = DomainGraph::from_json(g.to_json());
    CHECK(h.size() == g.size());
    CHECK(h.boundary_size() == g.boundary_size());
    CHECK(h.edges().size() == g.edges().size());
    CHECK(h.interior() == g.interior());
    CHECK(h.to_json() == g.to_json());
  }
}
