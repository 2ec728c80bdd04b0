#include <doctest.h>

#include <cmath>

#include "critsoup/gff.hpp"
#include "critsoup/stats.hpp"

using namespace critsoup;

namespace {

std::vector<ScalarField> draws(const DomainGraph& g, const GreenMatrix& G, std::size_t n, std::uint64_t seed) {
  const GffSampler s(G);
  std::vector<ScalarField> out;
  out.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    RandomStream rng(seed, i, Purpose::kGff);
    out.push_back(s.sample(rng));
  }
  (void)g;
  return out;
}

}  // namespace

TEST_SUITE("gff") {
  TEST_CASE("single vertex field has variance 1/4") {
    const DomainGraph g = build_rect_graph(1, 1);
    const GreenMatrix G = green_function(g);
    const auto fs = draws(g, G, 100000, 11);
    std::vector<double> sq;
    for (const auto& f : fs) sq.push_back(f[0] * f[0]);
    CHECK(std::abs(mean_test(sq, 0.25).statistic) < kStdErrorGate);
  }

  TEST_CASE("2x1 rectangle covariance is 1/15") {
    const DomainGraph g = build_rect_graph(2, 1);
    const GreenMatrix G = green_function(g);
    const auto fs = draws(g, G, 100000, 12);
    std::vector<double> prod;
    for (const auto& f : fs) prod.push_back(f[0] * f[1]);
    CHECK(std::abs(mean_test(prod, 1.0 / 15.0).statistic) < kStdErrorGate);
  }

  TEST_CASE("wick and shifted squares") {
    const DomainGraph g = build_disk_graph(3);
    const GreenMatrix G = green_function(g);
    const auto fs = draws(g, G, 20000, 13);
    std::vector<double> w;
    for (const auto& f : fs) w.push_back(wick_square(f, G)[2]);
    CHECK(std::abs(mean_test(w, 0.0).statistic) < kStdErrorGate);

    const ScalarField& phi = fs.front();
    const ScalarField ws = wick_square(phi, G);
    const ScalarField ss = shifted_square(phi, 1.5, G);
    CHECK(ws.role == FieldRole::kWickSquare);
    CHECK(ss.role == FieldRole::kShiftedSquare);
    for (std::size_t x = 0; x < phi.size(); ++x) {
      const int i = static_cast<int>(x);
      CHECK(ws[x] == doctest::Approx(phi[x] * phi[x] - G(i, i)));
      CHECK(ss[x] == doctest::Approx(ws[x] + 3.0 * phi[x]));
    }
  }

  TEST_CASE("sampling is reproducible per stream") {
    const DomainGraph g = build_disk_graph(3);
    const GreenMatrix G = green_function(g);
    RandomStream a(5, 7, Purpose::kGff), b(5, 7, Purpose::kGff);
    CHECK(sample_gff(g, G, a).values == sample_gff(g, G, b).values);
  }
}
