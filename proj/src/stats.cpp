#include "critsoup/stats.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

#include <boost/math/special_functions/gamma.hpp>

namespace critsoup {

double kolmogorov_survival(double lambda) {
  if (lambda <= 0.0) return 1.0;
  // The alternating series converges slowly for small lambda; use the
  // theta-function form there.
  if (lambda < 1.18) {
    const double pi = std::acos(-1.0);
    const double y = std::exp(-pi * pi / (8.0 * lambda * lambda));
    double cdf = 0.0;
    for (int k = 1; k < 200; k += 2) {
      const double term = std::pow(y, k * k);
      cdf += term;
      if (term < 1e-18) break;
    }
    cdf *= std::sqrt(2.0 * pi) / lambda;
    return std::clamp(1.0 - cdf, 0.0, 1.0);
  }
  double sum = 0.0;
  double sign = 1.0;
  for (int k = 1; k <= 100; ++k) {
    const double term = std::exp(-2.0 * k * k * lambda * lambda);
    sum += sign * term;
    if (term < 1e-18) break;
    sign = -sign;
  }
  return std::clamp(2.0 * sum, 0.0, 1.0);
}

double normal_two_sided_p(double z) {
  if (std::isnan(z)) return std::numeric_limits<double>::quiet_NaN();
  return std::erfc(std::abs(z) / std::sqrt(2.0));
}

namespace {

double ks_p_value(double d, double n_eff) {
  const double root = std::sqrt(n_eff);
  return kolmogorov_survival((root + 0.12 + 0.11 / root) * d);
}

}  // namespace

TestResult ks_two_sample(std::span<const double> a, std::span<const double> b) {
  if (a.empty() || b.empty()) throw std::invalid_argument("ks_two_sample: empty sample");
  std::vector<double> x(a.begin(), a.end());
  std::vector<double> y(b.begin(), b.end());
  std::sort(x.begin(), x.end());
  std::sort(y.begin(), y.end());
  const double n = static_cast<double>(x.size());
  const double m = static_cast<double>(y.size());
  std::size_t i = 0;
  std::size_t j = 0;
  double d = 0.0;
  while (i < x.size() && j < y.size()) {
    const double v = std::min(x[i], y[j]);
    while (i < x.size() && x[i] == v) ++i;
    while (j < y.size() && y[j] == v) ++j;
    d = std::max(d, std::abs(static_cast<double>(i) / n - static_cast<double>(j) / m));
  }
  return {d, ks_p_value(d, n * m / (n + m))};
}

TestResult ks_one_sample(std::span<const double> samples, const std::function<double(double)>& cdf) {
  if (samples.empty()) throw std::invalid_argument("ks_one_sample: empty sample");
  std::vector<double> x(samples.begin(), samples.end());
  std::sort(x.begin(), x.end());
  const double n = static_cast<double>(x.size());
  double d = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double f = cdf(x[i]);
    d = std::max({d, static_cast<double>(i + 1) / n - f, f - static_cast<double>(i) / n});
  }
  return {d, ks_p_value(d, n)};
}

TestResult gamma_ks(std::span<const double> samples, double shape, double scale) {
  if (!(shape > 0.0) || !(scale > 0.0)) throw std::invalid_argument("gamma_ks: parameters must be positive");
  return ks_one_sample(samples, [shape, scale](double x) {
    return x <= 0.0 ? 0.0 : boost::math::gamma_p(shape, x / scale);
  });
}

TestResult normal_ks(std::span<const double> samples, double mean, double sd) {
  if (!(sd > 0.0)) throw std::invalid_argument("normal_ks: sd must be positive");
  return ks_one_sample(samples, [mean, sd](double x) {
    return 0.5 * std::erfc(-(x - mean) / (sd * std::sqrt(2.0)));
  });
}

TestResult mean_test(std::span<const double> samples, double target) {
  if (samples.size() < 30) throw std::invalid_argument("mean_test: at least 30 samples required");
  const double mean = sample_mean(samples);
  const double se = std_error_of_mean(samples);
  if (se == 0.0) {
    if (mean == target) return {0.0, 1.0};
    const double inf = std::numeric_limits<double>::infinity();
    return {mean > target ? inf : -inf, 0.0};
  }
  const double z = (mean - target) / se;
  return {z, normal_two_sided_p(z)};
}

TestResult chi_square_gof(std::span<const std::size_t> observed, std::span<const double> expected) {
  if (observed.size() != expected.size() || observed.size() < 2) {
    throw std::invalid_argument("chi_square_gof: need matching cell counts (>= 2)");
  }
  const double total = static_cast<double>(std::accumulate(observed.begin(), observed.end(), std::size_t{0}));
  double stat = 0.0;
  for (std::size_t k = 0; k < observed.size(); ++k) {
    const double e = total * expected[k];
    if (!(e > 0.0)) throw std::invalid_argument("chi_square_gof: expected probabilities must be positive");
    const double diff = static_cast<double>(observed[k]) - e;
    stat += diff * diff / e;
  }
  const double dof = static_cast<double>(observed.size() - 1);
  return {stat, boost::math::gamma_q(0.5 * dof, 0.5 * stat)};
}

void RunningMoments::add(double x) {
  ++n_;
  const double delta = x - mean_;
  mean_ += delta / static_cast<double>(n_);
  m2_ += delta * (x - mean_);
}

double RunningMoments::variance() const {
  return n_ > 1 ? m2_ / static_cast<double>(n_ - 1) : 0.0;
}

double RunningMoments::std_error() const {
  return n_ > 1 ? std::sqrt(variance() / static_cast<double>(n_)) : 0.0;
}

double sample_mean(std::span<const double> x) {
  if (x.empty()) return 0.0;
  return std::accumulate(x.begin(), x.end(), 0.0) / static_cast<double>(x.size());
}

double sample_variance(std::span<const double> x) {
  if (x.size() < 2) return 0.0;
  const double m = sample_mean(x);
  double s = 0.0;
  for (double v : x) s += (v - m) * (v - m);
  return s / static_cast<double>(x.size() - 1);
}

double std_error_of_mean(std::span<const double> x) {
  if (x.size() < 2) return 0.0;
  return std::sqrt(sample_variance(x) / static_cast<double>(x.size()));
}

Correlation pearson_correlation(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw std::invalid_argument("pearson_correlation: size mismatch");
  Correlation c;
  c.n = a.size();
  if (c.n < 4) return c;
  const double ma = sample_mean(a);
  const double mb = sample_mean(b);
  double sab = 0.0;
  double saa = 0.0;
  double sbb = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    sab += (a[i] - ma) * (b[i] - mb);
    saa += (a[i] - ma) * (a[i] - ma);
    sbb += (b[i] - mb) * (b[i] - mb);
  }
  c.r = (saa > 0.0 && sbb > 0.0) ? sab / std::sqrt(saa * sbb) : 0.0;
  c.std_error = 1.0 / std::sqrt(static_cast<double>(c.n) - 3.0);
  return c;
}

PairedSummary paired_summary(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw std::invalid_argument("paired_summary: size mismatch");
  PairedSummary s;
  s.n = a.size();
  if (s.n == 0) return s;
  std::vector<double> diff(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) diff[i] = a[i] - b[i];
  s.mean_a = sample_mean(a);
  s.mean_b = sample_mean(b);
  s.mean_diff = sample_mean(diff);
  s.std_error = std_error_of_mean(diff);
  if (s.std_error > 0.0) {
    s.z = s.mean_diff / s.std_error;
    s.p_value = normal_two_sided_p(s.z);
  } else {
    s.z = s.mean_diff == 0.0 ? 0.0 : std::copysign(std::numeric_limits<double>::infinity(), s.mean_diff);
    s.p_value = s.mean_diff == 0.0 ? 1.0 : 0.0;
  }
  s.ratio = s.mean_b != 0.0 ? s.mean_a / s.mean_b : std::numeric_limits<double>::quiet_NaN();
  return s;
}

}  // namespace critsoup
