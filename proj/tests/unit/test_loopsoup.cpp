#include <doctest.h>

#include <cmath>
#include <sstream>

#include "critsoup/loopsoup.hpp"
#include "critsoup/stats.hpp"

using namespace critsoup;

TEST_SUITE("loopsoup") {
  TEST_CASE("exact loop masses on the 2x1 rectangle") {
    const DomainGraph g = build_rect_graph(2, 1);
    CHECK(loop_mass(g, 2) == doctest::Approx(1.0 / 16.0).epsilon(1e-14));
    CHECK(loop_mass(g, 3) == doctest::Approx(0.0));
    CHECK(loop_mass(g, 4) == doctest::Approx(1.0 / 512.0).epsilon(1e-14));
    CHECK_THROWS_AS(loop_mass(g, 1), std::invalid_argument);
  }

  TEST_CASE("spectral masses match matrix powers") {
    const LoopSoupSampler s(build_rect_graph(3, 3));
    for (int l = 2; l <= 12; ++l) CHECK(s.mass(l) == doctest::Approx(loop_mass(s.graph(), l)).epsilon(1e-12));
    CHECK(s.mass(5) == 0.0);
    CHECK(s.tail_mass() < kDefaultTailTolerance);
    const LoopSoupSampler fixed(build_rect_graph(3, 3), 6);
    CHECK(fixed.l_max() == 6);
    CHECK_THROWS_AS(LoopSoupSampler(build_rect_graph(2, 2), 1), std::invalid_argument);
  }

  TEST_CASE("length-2 count mean is 1/32 at alpha 1/2") {
    const LoopSoupSampler s(build_rect_graph(2, 1));
    std::vector<double> counts;
    for (std::size_t r = 0; r < 100000; ++r) {
      RandomStream rng(3, r, Purpose::kSoup);
      const LoopSoup soup = s.sample(0.5, rng);
      double c = 0.0;
      for (const auto& loop : soup.loops) c += loop.length() == 2 ? 1.0 : 0.0;
      counts.push_back(c);
    }
    CHECK(std::abs(mean_test(counts, 1.0 / 32.0).statistic) < kStdErrorGate);
  }

  TEST_CASE("sampled loops are valid rooted loops") {
    const LoopSoupSampler s(build_disk_graph(5));
    RandomStream rng(4, 0, Purpose::kSoup);
    for (int k = 0; k < 20; ++k) {
      const LoopSoup soup = s.sample(1.0, rng);
      for (const auto& loop : soup.loops) {
        CHECK(is_valid_loop(loop, s.graph()));
        CHECK(loop.length() % 2 == 0);
        CHECK(static_cast<int>(loop.length()) <= s.l_max());
      }
    }
    for (int len : {2, 4, 10, 40}) {
      const int v0 = s.sample_root(len, rng);
      const auto bridge = s.sample_bridge(v0, len, rng);
      REQUIRE(bridge.size() == static_cast<std::size_t>(len));
      CHECK(bridge.front() == v0);
      CHECK(is_valid_loop(RootedLoop{bridge, {}}, s.graph()));
    }
  }

  TEST_CASE("loop validity rules") {
    const DomainGraph g = build_rect_graph(3, 1);
    CHECK(is_valid_loop({{0, 1}, {}}, g));
    CHECK_FALSE(is_valid_loop({{0}, {}}, g));
    CHECK_FALSE(is_valid_loop({{0, 2}, {}}, g));
    CHECK_FALSE(is_valid_loop({{0, 1}, {1.0}}, g));
    CHECK_FALSE(is_valid_loop({{0, 5}, {}}, g));
  }

  TEST_CASE("occupation mean is alpha G_xx") {
    const DomainGraph g = build_rect_graph(2, 1);
    const GreenMatrix G = green_function(g);
    const LoopSoupSampler s(g);
    for (double alpha : {0.5, 1.3}) {
      std::vector<double> lx;
      for (std::size_t r = 0; r < 50000; ++r) {
        RandomStream rng(9, r, Purpose::kSoup);
        LoopSoup soup = s.sample(alpha, rng);
        const OccupationField occ = occupation_field(soup, g, rng);
        lx.push_back(occ.local_time[0]);
      }
      CHECK(std::abs(mean_test(lx, alpha * G(0, 0)).statistic) < kStdErrorGate);
    }
  }

  TEST_CASE("holding times are attached and text round trip") {
    const LoopSoupSampler s(build_disk_graph(4));
    RandomStream rng(10, 0, Purpose::kSoup);
    LoopSoup soup = s.sample(0.5, rng);
    const OccupationField occ = occupation_field(soup, s.graph(), rng);
    double sum = 0.0;
    for (const auto& loop : soup.loops) {
      REQUIRE(loop.holding.size() == loop.length());
      for (double h : loop.holding) sum += h;
    }
    for (double t : occ.trivial) sum += t;
    double total = 0.0;
    for (double t : occ.local_time) total += t;
    CHECK(sum == doctest::Approx(total));

    std::stringstream io;
    write_soup_text(io, soup);
    const LoopSoup back = read_soup_text(io, 0.5);
    REQUIRE(back.loops.size() == soup.loops.size());
    for (std::size_t i = 0; i < soup.loops.size(); ++i) CHECK(back.loops[i].vertices == soup.loops[i].vertices);
  }

  TEST_CASE("alpha and c conversion") {
    CHECK(alpha_from_c(1.0) == 0.5);
    CHECK(c_from_alpha(0.25) == 0.5);
  }
}
