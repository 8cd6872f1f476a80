#ifndef TIPLA_RNG_HPP_
#define TIPLA_RNG_HPP_

#include <cstdint>
#include <limits>
#include <span>

namespace tipla {

// Bumped whenever the bit stream produced for a given seed changes.
inline constexpr int kGeneratorVersion = 1;

// SplitMix64 step; advances `state` and returns the mixed output.
std::uint64_t splitmix64(std::uint64_t& state);

// Deterministic hash of (seed, a, b) used to derive independent child seeds.
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t a, std::uint64_t b = 0);

// Stream families carved out of one master seed.
enum class StreamDomain : std::uint64_t {
  noise = 1,     // xi^(0) (index 0) and xi^(i) (index i)
  init = 2,      // initial state draws
  probe = 3,     // assumption / property probes
  data = 4,      // synthetic data generation
  cell = 5,      // experiment cells (sweeps, repeats)
  resample = 6,  // bootstrap resampling in metrics
};

// xoshiro256++ generator with a cached Marsaglia-polar normal deviate.
// Satisfies std::uniform_random_bit_generator.
class RandomStream {
 public:
  using result_type = std::uint64_t;

  explicit RandomStream(std::uint64_t seed = 0);

  // Stream `index` of family `domain` under `master_seed`.
  static RandomStream derive(std::uint64_t master_seed, StreamDomain domain,
                             std::uint64_t index = 0);

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }
  result_type operator()() { return next(); }

  std::uint64_t next();
  // Uniform on [0, 1) with 53 random bits.
  double uniform();
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  std::uint64_t uniform_index(std::uint64_t n);
  double normal();
  void fill_normal(std::span<double> out);
  bool bernoulli(double p) { return uniform() < p; }

 private:
  std::uint64_t s_[4];
  double cached_normal_ = 0.0;
  bool has_cached_ = false;
};

// One draw from the density proportional to
//   exp(-(u - center)^4 / sigma2^2 - (u - center)^2 / sigma2)
// by rejection from N(center, sigma2 / 2).
double sample_generalized_gaussian(RandomStream& rng, double center, double sigma2);

// Uniform point in the Euclidean ball of the given radius.
void sample_ball(RandomStream& rng, double radius, std::span<double> out);

}  // namespace tipla

#endif  // TIPLA_RNG_HPP_
