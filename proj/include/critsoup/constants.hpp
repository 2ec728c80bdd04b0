#pragma once

#include <string>
#include <vector>

#include <boost/rational.hpp>

namespace critsoup {

/// Exact value q * pi^p with rational q.
struct PiMultiple {
  boost::rational<long long> coefficient;
  int pi_power = 0;

  double value() const;
  std::string to_string() const;
};

/// Integral of (y - x)^{-2} over x in [-2, -1], y in [1, 2], by nested
/// Gauss-Kronrod quadrature. Closed form ln(9/8).
double excursion_mass_quadrature();

/// Probability that no excursion of the mass above occurs: exp(-mass).
double avoidance_probability(double mass);

/// lambda^2 = pi / 8.
PiMultiple lambda_squared();
/// beta from beta * pi = (2 lambda)^2 / 2.
PiMultiple beta_from_lambda(const PiMultiple& lambda_sq);
/// k from k u^2 pi = u^2 / 2 (mean matching of the Dynkin identity).
PiMultiple dynkin_k();

struct ConstantRow {
  std::string name;
  double value = 0.0;
  double target = 0.0;
  double tolerance = 0.0;
  std::string exact;  // symbolic form when available
  bool pass() const;
};

std::vector<ConstantRow> compute_constants();

/// c(kappa) = (3 kappa - 8)(6 - kappa) / (2 kappa), for kappa in [8/3, 4].
double c_from_kappa(double kappa);
/// Root of c(kappa) = c in (8/3, 4], for c in (0, 1].
double kappa_from_c(double c);

}  // namespace critsoup
