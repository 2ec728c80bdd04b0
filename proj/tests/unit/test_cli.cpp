#include <doctest.h>

#include <cmath>

#include "critsoup/config.hpp"
#include "critsoup/constants.hpp"
#include "critsoup/experiments.hpp"

using namespace critsoup;

TEST_SUITE("cli") {
  TEST_CASE("kappa and central charge") {
    CHECK(kappa_from_c(1.0) == 4.0);
    CHECK(kappa_from_c(0.5) == 3.0);
    CHECK(c_from_kappa(8.0 / 3.0) == doctest::Approx(0.0).epsilon(1e-15));
    CHECK(c_from_kappa(4.0) == 1.0);
    for (int i = 1; i <= 100; ++i) {
      const double c = i / 100.0;
      CHECK(std::abs(c_from_kappa(kappa_from_c(c)) - c) < 1e-12);
    }
    CHECK_THROWS_AS(kappa_from_c(0.0), std::out_of_range);
    CHECK_THROWS_AS(kappa_from_c(1.5), std::out_of_range);
    CHECK_THROWS_AS(c_from_kappa(5.0), std::out_of_range);
  }

  TEST_CASE("continuum constants") {
    CHECK(excursion_mass_quadrature() == doctest::Approx(std::log(9.0 / 8.0)).epsilon(1e-10));
    CHECK(avoidance_probability(std::log(9.0 / 8.0)) == doctest::Approx(8.0 / 9.0));
    const PiMultiple l2 = lambda_squared();
    CHECK(l2.to_string() == "1/8 * pi");
    const PiMultiple beta = beta_from_lambda(l2);
    CHECK(beta.pi_power == 0);
    CHECK(beta.coefficient == boost::rational<long long>(1, 4));
    CHECK(dynkin_k().value() == doctest::Approx(1.0 / (2.0 * M_PI)));
    for (const auto& row : compute_constants()) CHECK_MESSAGE(row.pass(), row.name);
  }

  TEST_CASE("config parsing") {
    const auto cfg = parse_config(R"({"graph": {"type": "disk", "radius": 6}, "c": 1, "replicas": 2000, "seed": 5})");
    REQUIRE(cfg.graph.has_value());
    CHECK(cfg.graph->radius == 6);
    CHECK(cfg.alpha() == 0.5);
    CHECK(cfg.replicas == 2000u);
    CHECK(cfg.seed == 5u);
    CHECK(parse_config(R"({"alpha": 0.4})").c == doctest::Approx(0.8));

    auto key_of = [](const std::string& text) {
      try {
        validate(parse_config(text), true);
      } catch (const ConfigError& e) {
        return e.key();
      }
      return std::string();
    };
    CHECK(key_of(R"({"colour": 1})") == "colour");
    CHECK(key_of(R"({"c": 1, "alpha": 0.3})") == "alpha");
    CHECK(key_of(R"({"replicas": 10})") == "replicas");
    CHECK(key_of(R"({"graph": {"type": "disk", "radius": 0}})") == "graph.radius");
    CHECK(key_of(R"({"graph": {"type": "hexagon"}})") == "graph.type");
    CHECK(key_of(R"({"c": "one"})") == "c");
    CHECK(key_of("[1]") == "<document>");
  }

  TEST_CASE("experiment dispatch") {
    CHECK(experiment_catalog().size() >= 10);
    ExperimentConfig cfg;
    cfg.graph = GraphSpec::rect(2, 1);
    CHECK(run_experiment("green", cfg).passed());
    CHECK_THROWS_AS(run_experiment("no-such-experiment", cfg), std::invalid_argument);
  }

  TEST_CASE("Le Jan check rejects a mismatched intensity") {
    ExperimentConfig cfg;
    cfg.graph = GraphSpec::disk(3);
    cfg.replicas = 5000;
    cfg.c = 0.8;
    CHECK_FALSE(run_experiment("lejan", cfg).passed());
    cfg.c = 1.0;
    CHECK(run_experiment("lejan", cfg).passed());
  }

  TEST_CASE("reports do not depend on the thread count") {
    ExperimentConfig cfg;
    cfg.replicas = 1000;
    cfg.graph = GraphSpec::disk(4);
    cfg.threads = 1;
    const std::string one = run_experiment("lupu-consistency", cfg).to_csv();
    cfg.threads = 3;
    CHECK(run_experiment("lupu-consistency", cfg).to_csv() == one);
  }
}
