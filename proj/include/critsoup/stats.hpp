#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

namespace critsoup {

struct TestResult {
  double statistic = 0.0;
  double p_value = 1.0;
};

/// Global significance gate shared by every statistical check.
inline constexpr double kPValueGate = 1e-3;
/// Tolerance, in standard errors, for moment identities.
inline constexpr double kStdErrorGate = 5.0;

/// Survival function of the Kolmogorov distribution, P(K > lambda).
double kolmogorov_survival(double lambda);

/// Two-sided normal p-value of a z-score.
double normal_two_sided_p(double z);

/// Two-sample Kolmogorov-Smirnov test with the asymptotic p-value
/// (Stephens' small-sample correction applied to the effective size).
TestResult ks_two_sample(std::span<const double> a, std::span<const double> b);

/// One-sample KS test against a continuous CDF.
TestResult ks_one_sample(std::span<const double> samples, const std::function<double(double)>& cdf);

/// KS test against Gamma(shape, scale).
TestResult gamma_ks(std::span<const double> samples, double shape, double scale);

/// KS test against Normal(mean, sd^2).
TestResult normal_ks(std::span<const double> samples, double mean, double sd);

/// z-test of the sample mean against a target. Needs at least 30 samples.
/// A zero-variance sample passes (z = 0, p = 1) iff its mean equals target.
TestResult mean_test(std::span<const double> samples, double target);

/// Pearson chi-square goodness of fit; `expected` are probabilities that sum
/// to one. Degrees of freedom = number of cells - 1.
TestResult chi_square_gof(std::span<const std::size_t> observed, std::span<const double> expected);

/// Streaming mean/variance (Welford).
class RunningMoments {
 public:
  void add(double x);
  std::size_t count() const { return n_; }
  double mean() const { return mean_; }
  double variance() const;  // unbiased
  double std_error() const;

 private:
  std::size_t n_ = 0;
  double mean_ = 0.0;
  double m2_ = 0.0;
};

double sample_mean(std::span<const double> x);
double sample_variance(std::span<const double> x);  // unbiased
double std_error_of_mean(std::span<const double> x);

/// Pearson correlation and its large-sample standard error (1 - r^2)/sqrt(n-3)
/// evaluated at r = 0, i.e. 1/sqrt(n-3).
struct Correlation {
  double r = 0.0;
  double std_error = 0.0;
  std::size_t n = 0;
};
Correlation pearson_correlation(std::span<const double> a, std::span<const double> b);

/// Summary of a paired comparison between per-replica observations.
struct PairedSummary {
  std::size_t n = 0;
  double mean_a = 0.0;
  double mean_b = 0.0;
  double mean_diff = 0.0;
  double std_error = 0.0;  // of the mean difference
  double z = 0.0;
  double p_value = 1.0;
  double ratio = 0.0;  // mean_a / mean_b
};
PairedSummary paired_summary(std::span<const double> a, std::span<const double> b);

}  // namespace critsoup
