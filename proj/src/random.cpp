#include "critsoup/random.hpp"

#include <array>
#include <cmath>
#include <stdexcept>

namespace critsoup {
namespace {

std::uint64_t splitmix64(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

std::mt19937_64 keyed_engine(std::uint64_t seed, std::uint64_t index, std::uint64_t tag) {
  std::uint64_t state = seed;
  std::array<std::uint32_t, 8> words{};
  const std::array<std::uint64_t, 3> key{seed, index, tag};
  for (std::size_t i = 0; i < 4; ++i) {
    state ^= key[i % key.size()] + 0x632be59bd9b4e019ULL * (i + 1);
    const std::uint64_t h = splitmix64(state);
    words[2 * i] = static_cast<std::uint32_t>(h);
    words[2 * i + 1] = static_cast<std::uint32_t>(h >> 32);
  }
  std::seed_seq seq(words.begin(), words.end());
  return std::mt19937_64(seq);
}

}  // namespace

RandomStream::RandomStream(std::uint64_t seed, std::uint64_t index, std::uint64_t tag)
    : seed_(seed), index_(index), tag_(tag), engine_(keyed_engine(seed, index, tag)) {}

double RandomStream::uniform() { return std::generate_canonical<double, 53>(*this); }

double RandomStream::normal() { return normal_(*this); }

double RandomStream::exponential() {
  // 1 - U lies in (0, 1], so the log is finite.
  return -std::log1p(-uniform());
}

double RandomStream::gamma(double shape) {
  if (!(shape > 0.0)) throw std::invalid_argument("gamma shape must be positive");
  std::gamma_distribution<double> dist(shape, 1.0);
  return dist(*this);
}

// Michael, Schucany and Haas: transform a chi-square(1) draw and pick one of
// the two roots.
double RandomStream::inverse_gaussian(double mean, double shape) {
  if (!(mean > 0.0) || !(shape > 0.0)) throw std::invalid_argument("inverse_gaussian parameters must be positive");
  const double z = normal();
  const double y = z * z;
  const double x = mean + mean * mean * y / (2.0 * shape) -
                   mean / (2.0 * shape) * std::sqrt(4.0 * mean * shape * y + mean * mean * y * y);
  return uniform() <= mean / (mean + x) ? x : mean * mean / x;
}

std::uint64_t RandomStream::poisson(double mean) {
  if (mean < 0.0 || !std::isfinite(mean)) throw std::invalid_argument("poisson mean must be finite and >= 0");
  if (mean == 0.0) return 0;
  std::poisson_distribution<std::uint64_t> dist(mean);
  return dist(*this);
}

bool RandomStream::bernoulli(double p) {
  if (p <= 0.0) return false;
  if (p >= 1.0) return true;
  return uniform() < p;
}

std::size_t RandomStream::uniform_index(std::size_t n) {
  std::uniform_int_distribution<std::size_t> dist(0, n - 1);
  return dist(*this);
}

}  // namespace critsoup
