#pragma once

#include <cstdint>
#include <random>

namespace critsoup {

// Purpose tags used to split one replica's randomness into independent
// substreams. Values are part of the reproducibility contract; append only.
enum class Purpose : std::uint64_t {
  kGeneric = 0,
  kSoup = 1,
  kOccupation = 2,
  kClusters = 3,
  kGff = 4,
  kSigns = 5,
  kExcursions = 6,
  kComparison = 7,
  kFreshSoup = 8,
  kFreshOccupation = 9,
  kSecondGff = 10,
  kCutPoints = 11,
};

/// Reproducible random stream keyed on (seed, index, tag).
///
/// The key is hashed into the seed sequence of a 64-bit Mersenne twister, so
/// streams with distinct keys are independent for all practical purposes and
/// a given key always reproduces the same sequence regardless of which thread
/// consumes it.
class RandomStream {
 public:
  using result_type = std::uint64_t;

  RandomStream(std::uint64_t seed, std::uint64_t index, std::uint64_t tag = 0);
  RandomStream(std::uint64_t seed, std::uint64_t index, Purpose purpose)
      : RandomStream(seed, index, static_cast<std::uint64_t>(purpose)) {}

  /// Substream of the same (seed, index) with a different purpose tag.
  [[nodiscard]] RandomStream derive(Purpose purpose) const {
    return RandomStream(seed_, index_, purpose);
  }
  [[nodiscard]] RandomStream derive(std::uint64_t tag) const {
    return RandomStream(seed_, index_, tag);
  }

  std::uint64_t seed() const { return seed_; }
  std::uint64_t index() const { return index_; }
  std::uint64_t tag() const { return tag_; }
  std::uint64_t counter() const { return counter_; }

  static constexpr result_type min() { return std::mt19937_64::min(); }
  static constexpr result_type max() { return std::mt19937_64::max(); }
  result_type operator()() {
    ++counter_;
    return engine_();
  }

  double uniform();                 // [0, 1)
  double normal();                  // N(0, 1)
  double exponential();             // Exp(1)
  double gamma(double shape);       // Gamma(shape, scale 1)
  double inverse_gaussian(double mean, double shape);
  std::uint64_t poisson(double mean);
  bool bernoulli(double p);
  std::size_t uniform_index(std::size_t n);

 private:
  std::uint64_t seed_;
  std::uint64_t index_;
  std::uint64_t tag_;
  std::uint64_t counter_ = 0;
  std::mt19937_64 engine_;
  std::normal_distribution<double> normal_;
};

}  // namespace critsoup
