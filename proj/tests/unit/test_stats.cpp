#include <doctest.h>

#include <cmath>

#include "critsoup/random.hpp"
#include "critsoup/report.hpp"
#include "critsoup/stats.hpp"

using namespace critsoup;

TEST_SUITE("stats") {
  TEST_CASE("normal tail") {
    CHECK(normal_two_sided_p(0.0) == doctest::Approx(1.0));
    CHECK(normal_two_sided_p(1.959963984540054) == doctest::Approx(0.05).epsilon(1e-9));
    CHECK(kolmogorov_survival(0.0) == doctest::Approx(1.0));
    CHECK(kolmogorov_survival(1.3580986393225505) == doctest::Approx(0.05).epsilon(1e-6));
  }

  TEST_CASE("two-sample KS") {
    RandomStream rng(1, 0);
    std::vector<double> a(3000), b(3000), c(3000);
    for (auto& x : a) x = rng.normal();
    for (auto& x : b) x = rng.normal();
    for (auto& x : c) x = rng.normal() + 0.3;
    CHECK(ks_two_sample(a, a).statistic == 0.0);
    CHECK(ks_two_sample(a, b).p_value > kPValueGate);
    CHECK(ks_two_sample(a, c).p_value < 1e-6);
  }

  TEST_CASE("gamma and normal one-sample KS") {
    RandomStream rng(2, 0);
    std::vector<double> g(20000), e(20000), n(20000);
    for (auto& x : g) x = rng.gamma(0.5) / 4.0;
    for (auto& x : e) x = rng.exponential();
    for (auto& x : n) x = 2.0 + 3.0 * rng.normal();
    CHECK(gamma_ks(g, 0.5, 0.25).p_value > kPValueGate);
    CHECK(gamma_ks(e, 1.0, 1.0).p_value > kPValueGate);
    CHECK(gamma_ks(e, 1.0, 2.0).p_value < 1e-6);
    CHECK(normal_ks(n, 2.0, 3.0).p_value > kPValueGate);
  }

  TEST_CASE("mean test and moments") {
    const std::vector<double> x{1, 2, 3, 4, 5};
    CHECK(sample_mean(x) == 3.0);
    CHECK(sample_variance(x) == doctest::Approx(2.5));
    CHECK(std_error_of_mean(x) == doctest::Approx(std::sqrt(0.5)));
    std::vector<double> y;
    for (int i = 0; i < 8; ++i) y.insert(y.end(), x.begin(), x.end());
    // mean 3, unbiased variance 80/39, n = 40
    CHECK(mean_test(y, 3.0).statistic == doctest::Approx(0.0));
    CHECK(mean_test(y, 2.0).statistic == doctest::Approx(1.0 / std::sqrt(80.0 / 39.0 / 40.0)));
    CHECK_THROWS(mean_test(x, 3.0));
    RunningMoments m;
    for (double v : x) m.add(v);
    CHECK(m.mean() == 3.0);
    CHECK(m.variance() == doctest::Approx(2.5));
  }

  TEST_CASE("chi-square goodness of fit") {
    const std::vector<std::size_t> obs{100, 100, 100, 100};
    const std::vector<double> exp{0.25, 0.25, 0.25, 0.25};
    CHECK(chi_square_gof(obs, exp).statistic == 0.0);
    CHECK(chi_square_gof(obs, exp).p_value == doctest::Approx(1.0));
    const std::vector<std::size_t> bad{160, 40, 100, 100};
    CHECK(chi_square_gof(bad, exp).p_value < 1e-6);
  }

  TEST_CASE("correlation and paired summary") {
    const std::vector<double> a{1, 2, 3, 4, 5, 6};
    const std::vector<double> b{2, 4, 6, 8, 10, 12};
    CHECK(pearson_correlation(a, b).r == doctest::Approx(1.0));
    const auto p = paired_summary(b, a);
    CHECK(p.mean_diff == doctest::Approx(3.5));
    CHECK(p.ratio == doctest::Approx(2.0));
    CHECK(p.n == 6);
  }

  TEST_CASE("report csv and verdicts") {
    StatReport rep("demo");
    StatRow row;
    row.functional = "x";
    row.parameter = 0.25;
    row.n_effective = 10;
    row.gate = true;
    row.pass = true;
    rep.add(row);
    CHECK(rep.passed());
    row.pass = false;
    row.gate = false;
    rep.add(row);
    CHECK(rep.passed());
    row.gate = true;
    rep.add(row);
    CHECK_FALSE(rep.passed());
    CHECK(rep.failures() == 1);
    const std::string csv = rep.to_csv();
    CHECK(csv.rfind("experiment,functional,beta,n_effective,statistic,p_value,ratio,std_error\n", 0) == 0);
    row.p_value = 2.0;
    CHECK_THROWS(rep.add(row));
  }

  TEST_CASE("inverse Gaussian moments") {
    RandomStream rng(3, 0);
    std::vector<double> x(100000);
    for (auto& v : x) v = rng.inverse_gaussian(0.7, 2.0);
    CHECK(std::abs(mean_test(x, 0.7).statistic) < kStdErrorGate);
    // variance mean^3 / shape
    CHECK(sample_variance(x) == doctest::Approx(0.343 / 2.0).epsilon(0.03));
    CHECK_THROWS(rng.inverse_gaussian(0.0, 1.0));
  }

  TEST_CASE("random streams are keyed") {
    RandomStream a(1, 2, Purpose::kSoup), b(1, 2, Purpose::kSoup), c(1, 2, Purpose::kGff);
    const auto x = a(), y = b(), z = c();
    CHECK(x == y);
    CHECK(x != z);
  }
}
