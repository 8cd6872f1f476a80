#include "tipla/rng.hpp"

#include <bit>
#include <cmath>

namespace tipla {

std::uint64_t splitmix64(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t a, std::uint64_t b) {
  std::uint64_t state = seed;
  std::uint64_t h = splitmix64(state);
  state = h ^ (a * 0xd1342543de82ef95ULL);
  h = splitmix64(state);
  state = h ^ (b * 0xa0761d6478bd642fULL);
  return splitmix64(state);
}

RandomStream::RandomStream(std::uint64_t seed) {
  std::uint64_t state = seed;
  for (auto& word : s_) word = splitmix64(state);
}

RandomStream RandomStream::derive(std::uint64_t master_seed, StreamDomain domain,
                                  std::uint64_t index) {
  return RandomStream(
      derive_seed(master_seed, static_cast<std::uint64_t>(domain), index));
}

std::uint64_t RandomStream::next() {
  const std::uint64_t result = std::rotl(s_[0] + s_[3], 23) + s_[0];
  const std::uint64_t t = s_[1] << 17;
  s_[2] ^= s_[0];
  s_[3] ^= s_[1];
  s_[1] ^= s_[2];
  s_[0] ^= s_[3];
  s_[2] ^= t;
  s_[3] = std::rotl(s_[3], 45);
  return result;
}

double RandomStream::uniform() {
  return static_cast<double>(next() >> 11) * 0x1.0p-53;
}

std::uint64_t RandomStream::uniform_index(std::uint64_t n) {
  // Lemire's nearly-divisionless method.
  __extension__ using u128 = unsigned __int128;
  u128 m = static_cast<u128>(next()) * n;
  auto low = static_cast<std::uint64_t>(m);
  if (low < n) {
    const std::uint64_t threshold = -n % n;
    while (low < threshold) {
      m = static_cast<u128>(next()) * n;
      low = static_cast<std::uint64_t>(m);
    }
  }
  return static_cast<std::uint64_t>(m >> 64);
}

double RandomStream::normal() {
  if (has_cached_) {
    has_cached_ = false;
    return cached_normal_;
  }
  double u, v, s;
  do {
    u = 2.0 * uniform() - 1.0;
    v = 2.0 * uniform() - 1.0;
    s = u * u + v * v;
  } while (s >= 1.0 || s == 0.0);
  const double factor = std::sqrt(-2.0 * std::log(s) / s);
  cached_normal_ = v * factor;
  has_cached_ = true;
  return u * factor;
}

void RandomStream::fill_normal(std::span<double> out) {
  for (double& value : out) value = normal();
}

double sample_generalized_gaussian(RandomStream& rng, double center, double sigma2) {
  const double proposal_sd = std::sqrt(0.5 * sigma2);
  const double sigma4 = sigma2 * sigma2;
  for (;;) {
    const double t = proposal_sd * rng.normal();
    const double t2 = t * t;
    if (rng.uniform() < std::exp(-t2 * t2 / sigma4)) return center + t;
  }
}

void sample_ball(RandomStream& rng, double radius, std::span<double> out) {
  double norm2 = 0.0;
  do {
    norm2 = 0.0;
    for (double& value : out) {
      value = rng.normal();
      norm2 += value * value;
    }
  } while (norm2 == 0.0);
  const double r =
      radius * std::pow(rng.uniform(), 1.0 / static_cast<double>(out.size()));
  const double scale = r / std::sqrt(norm2);
  for (double& value : out) value *= scale;
}

}  // namespace tipla
