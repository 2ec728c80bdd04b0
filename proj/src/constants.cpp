#include "critsoup/constants.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

#include <boost/math/constants/constants.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>

namespace critsoup {

double PiMultiple::value() const {
  return boost::rational_cast<double>(coefficient) * std::pow(boost::math::constants::pi<double>(), pi_power);
}

std::string PiMultiple::to_string() const {
  std::ostringstream out;
  out << coefficient.numerator();
  if (coefficient.denominator() != 1) out << '/' << coefficient.denominator();
  if (pi_power == 1) out << " * pi";
  if (pi_power != 0 && pi_power != 1) out << " * pi^" << pi_power;
  return out.str();
}

double excursion_mass_quadrature() {
  using boost::math::quadrature::gauss_kronrod;
  auto inner = [](double x) {
    return gauss_kronrod<double, 31>::integrate([x](double y) { return 1.0 / ((y - x) * (y - x)); }, 1.0, 2.0, 10,
                                                1e-14);
  };
  return gauss_kronrod<double, 31>::integrate(inner, -2.0, -1.0, 10, 1e-14);
}

double avoidance_probability(double mass) { return std::exp(-mass); }

PiMultiple lambda_squared() { return {boost::rational<long long>(1, 8), 1}; }

PiMultiple beta_from_lambda(const PiMultiple& lambda_sq) {
  // (2 lambda)^2 / 2 = 2 lambda^2, then divide by pi.
  return {lambda_sq.coefficient * 2LL, lambda_sq.pi_power - 1};
}

PiMultiple dynkin_k() { return {boost::rational<long long>(1, 2), -1}; }

bool ConstantRow::pass() const { return std::abs(value - target) <= tolerance; }

std::vector<ConstantRow> compute_constants() {
  const double pi = boost::math::constants::pi<double>();
  std::vector<ConstantRow> rows;
  const double mass = excursion_mass_quadrature();
  rows.push_back({"excursion_mass", mass, std::log(9.0 / 8.0), 1e-6, "ln(9/8)"});
  rows.push_back({"avoidance_probability", avoidance_probability(mass), 8.0 / 9.0, 1e-6, "8/9"});
  const PiMultiple lsq = lambda_squared();
  rows.push_back({"lambda", std::sqrt(lsq.value()), std::sqrt(pi / 8.0), 0.0, "sqrt(" + lsq.to_string() + ")"});
  const PiMultiple beta = beta_from_lambda(lsq);
  rows.push_back({"beta", beta.value(), 0.25, 0.0, beta.to_string()});
  const PiMultiple k = dynkin_k();
  rows.push_back({"k", k.value(), 1.0 / (2.0 * pi), 0.0, k.to_string()});
  rows.push_back({"kappa(c=1)", kappa_from_c(1.0), 4.0, 0.0, ""});
  rows.push_back({"kappa(c=1/2)", kappa_from_c(0.5), 3.0, 0.0, ""});
  rows.push_back({"c(kappa=8/3)", c_from_kappa(8.0 / 3.0), 0.0, 1e-15, ""});
  return rows;
}

double c_from_kappa(double kappa) {
  if (!(kappa >= 8.0 / 3.0 - 1e-15 && kappa <= 4.0)) throw std::out_of_range("c_from_kappa: kappa must lie in [8/3, 4]");
  return (3.0 * kappa - 8.0) * (6.0 - kappa) / (2.0 * kappa);
}

double kappa_from_c(double c) {
  if (!(c > 0.0 && c <= 1.0)) throw std::out_of_range("kappa_from_c: c must lie in (0, 1]");
  // 3 kappa^2 + (2c - 26) kappa + 48 = 0, smaller root.
  const double b = 26.0 - 2.0 * c;
  const double disc = std::max(b * b - 576.0, 0.0);
  return (b - std::sqrt(disc)) / 6.0;
}

}  // namespace critsoup
