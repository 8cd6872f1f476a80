#ifndef TIPLA_SAMPLER_HPP_
#define TIPLA_SAMPLER_HPP_

#include <cstddef>
#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "tipla/potentials.hpp"
#include "tipla/rng.hpp"
#include "tipla/taming.hpp"

namespace tipla {

enum class Algorithm { tipla_u, tipla_c, ipla, pgd };

std::string_view to_string(Algorithm algorithm);
std::optional<Algorithm> parse_algorithm(std::string_view text);
// uniform for tipla_u, coordinatewise for tipla_c, none otherwise.
TamingKind default_taming(Algorithm algorithm);

struct ThetaInit {
  enum class Kind { fixed, random_sign, gaussian };
  Kind kind = Kind::fixed;
  Vector value;        // fixed; empty means the zero vector
  double scale = 1.0;  // +-scale per coordinate, or the gaussian std

  bool operator==(const ThetaInit&) const = default;
};

struct ParticleInit {
  enum class Kind { gaussian, generalized_gaussian, deterministic };
  enum class Mean { zero, theta0, fixed, random_uniform };
  Kind kind = Kind::gaussian;
  Mean mean = Mean::zero;
  Vector mean_value;        // Mean::fixed, length d_x
  double mean_range = 0.0;  // Mean::random_uniform: one U(-r, r) draw per coordinate,
                            // shared by all particles
  double variance = 1.0;    // gaussian covariance variance * I; sigma^2 for the
                            // generalized gaussian
  Vector value;             // deterministic: length d_x (shared) or N * d_x

  bool operator==(const ParticleInit&) const = default;
};

struct InitPolicy {
  ThetaInit theta;
  ParticleInit particles;

  bool operator==(const InitPolicy&) const = default;
};

struct RunConfig {
  Algorithm algorithm = Algorithm::tipla_c;
  double lambda = 1e-4;
  std::size_t n_particles = 10;
  std::size_t n_steps = 1000;
  std::uint64_t seed = 1;
  InitPolicy init;
  std::size_t record_every = 1;
  std::size_t threads = 1;
  bool stop_on_divergence = false;
  std::optional<TamingKind> taming;  // defaults to default_taming(algorithm)
  bool strict = false;               // stepsize violations become errors

  TamingKind taming_kind() const { return taming.value_or(default_taming(algorithm)); }
  bool operator==(const RunConfig&) const = default;
};

// Throws ConfigError for out-of-range fields or unsupported init/model pairs.
void validate_run_config(const RunConfig& config, const PotentialModel& model);

// Stepsize admissibility:
//   tipla_u:  lambda < N^p / (4 mu)
//   tipla_c:  lambda < 1 / (4 mu) (separable condition) or 1 / (8 mu) (paired)
// ipla and pgd carry no constraint.
struct StepsizeCheck {
  bool admissible = true;
  double bound = 0.0;  // +inf when unconstrained
  std::string rule;
};

StepsizeCheck check_stepsize(const RunConfig& config, const PotentialModel& model,
                             const TamingSpec& taming);

// The taming spec a run uses: the configured kind with the model's mu and
// p = 2 ell + 1 for the model's current ell.
TamingSpec run_taming_spec(const RunConfig& config, const PotentialModel& model);

struct ParticleState {
  std::size_t step = 0;
  Vector theta;
  Vector particles;  // n_particles x d_x, row-major
  std::size_t n_particles = 0;
  std::size_t d_x = 0;
  bool diverged = false;
  std::optional<std::size_t> divergence_step;

  std::span<const double> particle(std::size_t i) const {
    return {particles.data() + i * d_x, d_x};
  }
  std::span<double> particle(std::size_t i) { return {particles.data() + i * d_x, d_x}; }
};

// |theta|^2 + (1/N) sum_i |X^i|^2, the squared norm of the rescaled state.
double rescaled_norm_sq(const ParticleState& state);

// Diverged: any non-finite coordinate or |theta| > 1e12.
inline constexpr double kDivergenceThreshold = 1e12;
bool is_diverged(const ParticleState& state);

// Drift and noise prefactors of one synchronous update:
//   theta += -theta_drift * sum_i h^theta_i + theta_noise * xi0
//   X^i   += -x_drift * h^x_i + x_noise * xi_i
struct StepCoefficients {
  ScaledFactor theta_drift;
  ScaledFactor theta_noise;
  ScaledFactor x_drift;
  ScaledFactor x_noise;

  // p is only used by tipla_u.
  static StepCoefficients for_algorithm(Algorithm algorithm, double lambda,
                                        std::size_t n_particles, double p);
};

// Source of the standard Gaussian increments xi^(0) (theta) and xi^(i).
// particle_noise must be safe to call concurrently for distinct i.
class NoiseSource {
 public:
  virtual ~NoiseSource() = default;
  virtual void theta_noise(std::span<double> out) = 0;
  virtual void particle_noise(std::size_t i, std::span<double> out) = 0;
};

// N + 1 independent streams derived from one seed: stream 0 feeds theta,
// stream i feeds particle i. Results do not depend on evaluation order.
class StreamNoise final : public NoiseSource {
 public:
  StreamNoise(std::uint64_t seed, std::size_t n_particles);
  // Particle i draws from stream permutation[i] instead of stream i + 1.
  StreamNoise(std::uint64_t seed, std::span<const std::size_t> permutation);

  void theta_noise(std::span<double> out) override;
  void particle_noise(std::size_t i, std::span<double> out) override;

 private:
  RandomStream theta_;
  std::vector<RandomStream> particles_;
};

ParticleState init_state(const RunConfig& config, const PotentialModel& model);

// Owns the scratch buffers and thread arena for repeated steps of one run.
class Sampler {
 public:
  Sampler(const PotentialModel& model, const RunConfig& config);
  Sampler(const PotentialModel& model, const RunConfig& config, const TamingSpec& taming);
  ~Sampler();
  Sampler(Sampler&&) noexcept;
  Sampler& operator=(Sampler&&) noexcept;

  const TamingSpec& taming() const;
  const StepCoefficients& coefficients() const;

  // One synchronous update of `state` in place.
  void step(ParticleState& state, NoiseSource& noise);

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

ParticleState step_tipla_u(const ParticleState& state, const PotentialModel& model,
                           const TamingSpec& spec, const RunConfig& config,
                           NoiseSource& noise);
ParticleState step_tipla_c(const ParticleState& state, const PotentialModel& model,
                           const TamingSpec& spec, const RunConfig& config,
                           NoiseSource& noise);
ParticleState step_ipla(const ParticleState& state, const PotentialModel& model,
                        const RunConfig& config, NoiseSource& noise);
ParticleState step_pgd(const ParticleState& state, const PotentialModel& model,
                       const RunConfig& config, NoiseSource& noise);

struct TrajectoryRecord {
  std::size_t step = 0;
  Vector theta;
  double rescaled_norm_sq = 0.0;
  bool diverged = false;
};

struct Trajectory {
  std::vector<TrajectoryRecord> records;  // strictly increasing in step
  double wall_time_seconds = 0.0;
  RunConfig config;
  TamingSpec taming;
  std::vector<std::string> warnings;
  std::optional<std::size_t> divergence_step;
  ParticleState final_state;
};

// Full run: validation, stepsize check (warning unless config.strict),
// initial state, n_steps updates, thinned records. The first and last
// states are always recorded.
Trajectory run(const RunConfig& config, const PotentialModel& model);
Trajectory run(const RunConfig& config, const PotentialModel& model, const TamingSpec& taming);
// Same, with an externally supplied initial state and noise.
Trajectory run(const RunConfig& config, const PotentialModel& model, const TamingSpec& taming,
               ParticleState initial, NoiseSource& noise);

}  // namespace tipla

#endif  // TIPLA_SAMPLER_HPP_
