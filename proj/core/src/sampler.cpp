#include "tipla/sampler.hpp"

#include <tbb/blocked_range.h>
#include <tbb/enumerable_thread_specific.h>
#include <tbb/parallel_for.h>
#include <tbb/task_arena.h>

#include <chrono>
#include <cmath>
#include <limits>
#include <sstream>

namespace tipla {

namespace {

// Sum of `rows` rows of width `width` into out, in a fixed binary-tree
// order that depends only on `rows`.
void pairwise_rows(const double* data, std::size_t rows, std::size_t width, double* out) {
  if (rows == 1) {
    for (std::size_t k = 0; k < width; ++k) out[k] = data[k];
    return;
  }
  if (rows == 2) {
    for (std::size_t k = 0; k < width; ++k) out[k] = data[k] + data[width + k];
    return;
  }
  const std::size_t half = rows / 2;
  Vector right(width);
  pairwise_rows(data, half, width, out);
  pairwise_rows(data + half * width, rows - half, width, right.data());
  for (std::size_t k = 0; k < width; ++k) out[k] += right[k];
}

std::string format_double(double v) {
  std::ostringstream os;
  os.precision(6);
  os << v;
  return os.str();
}

}  // namespace

std::string_view to_string(Algorithm algorithm) {
  switch (algorithm) {
    case Algorithm::tipla_u:
      return "tipla_u";
    case Algorithm::tipla_c:
      return "tipla_c";
    case Algorithm::ipla:
      return "ipla";
    case Algorithm::pgd:
      return "pgd";
  }
  return "tipla_c";
}

std::optional<Algorithm> parse_algorithm(std::string_view text) {
  if (text == "tipla_u") return Algorithm::tipla_u;
  if (text == "tipla_c") return Algorithm::tipla_c;
  if (text == "ipla") return Algorithm::ipla;
  if (text == "pgd") return Algorithm::pgd;
  return std::nullopt;
}

TamingKind default_taming(Algorithm algorithm) {
  switch (algorithm) {
    case Algorithm::tipla_u:
      return TamingKind::uniform;
    case Algorithm::tipla_c:
      return TamingKind::coordinatewise;
    default:
      return TamingKind::none;
  }
}

void validate_run_config(const RunConfig& config, const PotentialModel& model) {
  if (!(config.lambda > 0.0) || !std::isfinite(config.lambda)) {
    throw ConfigError("run.lambda: must be a finite number > 0");
  }
  if (config.n_particles < 1) throw ConfigError("run.n_particles: must be >= 1");
  if (config.threads < 1) throw ConfigError("run.threads: must be >= 1");
  if (config.record_every < 1) throw ConfigError("run.record_every: must be >= 1");

  const auto& theta = config.init.theta;
  if (theta.kind == ThetaInit::Kind::fixed && !theta.value.empty() &&
      theta.value.size() != model.d_theta()) {
    throw ConfigError("init.theta0: expected " + std::to_string(model.d_theta()) +
                      " values, got " + std::to_string(theta.value.size()));
  }
  for (double v : theta.value) {
    if (!std::isfinite(v)) throw ConfigError("init.theta0: values must be finite");
  }
  if (!(theta.scale >= 0.0) || !std::isfinite(theta.scale)) {
    throw ConfigError("init.theta_scale: must be a finite number >= 0");
  }

  const auto& particles = config.init.particles;
  using PK = ParticleInit::Kind;
  using PM = ParticleInit::Mean;
  if (particles.kind != PK::deterministic) {
    if (particles.mean == PM::theta0 && model.d_theta() != model.d_x()) {
      throw ConfigError("init.particle_mean: theta0 requires d_theta == d_x");
    }
    if (particles.mean == PM::fixed && particles.mean_value.size() != model.d_x()) {
      throw ConfigError("init.particle_mean_value: expected " + std::to_string(model.d_x()) +
                        " values");
    }
    if (!(particles.mean_range >= 0.0) || !std::isfinite(particles.mean_range)) {
      throw ConfigError("init.particle_mean_range: must be a finite number >= 0");
    }
    const bool needs_positive = particles.kind == PK::generalized_gaussian;
    if (!std::isfinite(particles.variance) || particles.variance < 0.0 ||
        (needs_positive && particles.variance == 0.0)) {
      throw ConfigError("init.particle_variance: out of range");
    }
  } else {
    const std::size_t n = particles.value.size();
    if (n != model.d_x() && n != model.d_x() * config.n_particles) {
      throw ConfigError("init.particle_values: expected d_x or N * d_x values");
    }
  }
}

TamingSpec run_taming_spec(const RunConfig& config, const PotentialModel& model) {
  return make_taming_spec(config.taming_kind(), model, config.lambda, config.n_particles);
}

StepsizeCheck check_stepsize(const RunConfig& config, const PotentialModel& model,
                             const TamingSpec& taming) {
  StepsizeCheck check;
  check.bound = std::numeric_limits<double>::infinity();
  switch (config.algorithm) {
    case Algorithm::tipla_u: {
      const double log_bound = taming.p_exponent *
                                   std::log(static_cast<double>(config.n_particles)) -
                               std::log(4.0 * taming.mu);
      check.bound = std::exp(log_bound);
      check.admissible = std::log(config.lambda) < log_bound;
      check.rule = "lambda < N^p / (4 mu)";
      break;
    }
    case Algorithm::tipla_c: {
      const bool paired = model.coordinate_condition().form == CoordinateForm::paired;
      check.bound = 1.0 / ((paired ? 8.0 : 4.0) * taming.mu);
      check.admissible = config.lambda < check.bound;
      check.rule = paired ? "lambda < 1 / (8 mu)" : "lambda < 1 / (4 mu)";
      break;
    }
    default:
      check.rule = "none";
      break;
  }
  return check;
}

double rescaled_norm_sq(const ParticleState& state) {
  double theta = 0.0;
  for (double v : state.theta) theta += v * v;
  double x = 0.0;
  for (double v : state.particles) x += v * v;
  return theta + x / static_cast<double>(state.n_particles);
}

bool is_diverged(const ParticleState& state) {
  double theta = 0.0;
  for (double v : state.theta) {
    if (!std::isfinite(v)) return true;
    theta += v * v;
  }
  if (!(std::sqrt(theta) <= kDivergenceThreshold)) return true;
  for (double v : state.particles) {
    if (!std::isfinite(v)) return true;
  }
  return false;
}

StepCoefficients StepCoefficients::for_algorithm(Algorithm algorithm, double lambda,
                                                 std::size_t n_particles, double p) {
  StepCoefficients c;
  const std::size_t n = n_particles;
  if (algorithm == Algorithm::tipla_u) {
    c.theta_drift = ScaledFactor::power_of(lambda, n, p + 1.0);
    c.theta_noise = ScaledFactor::power_of(std::sqrt(2.0 * lambda), n, 0.5 * (p + 1.0));
    c.x_drift = ScaledFactor::power_of(lambda, n, p);
    c.x_noise = ScaledFactor::power_of(std::sqrt(2.0 * lambda), n, 0.5 * p);
    return c;
  }
  c.theta_drift = ScaledFactor::power_of(lambda, n, 1.0);
  c.theta_noise = algorithm == Algorithm::pgd
                      ? ScaledFactor::zero()
                      : ScaledFactor::power_of(std::sqrt(2.0 * lambda), n, 0.5);
  c.x_drift = ScaledFactor::power_of(lambda, 1, 0.0);
  c.x_noise = ScaledFactor::power_of(std::sqrt(2.0 * lambda), 1, 0.0);
  return c;
}

StreamNoise::StreamNoise(std::uint64_t seed, std::size_t n_particles)
    : theta_(RandomStream::derive(seed, StreamDomain::noise, 0)) {
  particles_.reserve(n_particles);
  for (std::size_t i = 0; i < n_particles; ++i) {
    particles_.push_back(RandomStream::derive(seed, StreamDomain::noise, i + 1));
  }
}

StreamNoise::StreamNoise(std::uint64_t seed, std::span<const std::size_t> permutation)
    : theta_(RandomStream::derive(seed, StreamDomain::noise, 0)) {
  particles_.reserve(permutation.size());
  for (std::size_t index : permutation) {
    particles_.push_back(RandomStream::derive(seed, StreamDomain::noise, index));
  }
}

void StreamNoise::theta_noise(std::span<double> out) { theta_.fill_normal(out); }

void StreamNoise::particle_noise(std::size_t i, std::span<double> out) {
  particles_.at(i).fill_normal(out);
}

ParticleState init_state(const RunConfig& config, const PotentialModel& model) {
  validate_run_config(config, model);
  const std::size_t d_theta = model.d_theta();
  const std::size_t d_x = model.d_x();
  const std::size_t n = config.n_particles;

  ParticleState state;
  state.n_particles = n;
  state.d_x = d_x;
  state.theta.assign(d_theta, 0.0);
  state.particles.assign(n * d_x, 0.0);

  const auto& ti = config.init.theta;
  RandomStream theta_rng = RandomStream::derive(config.seed, StreamDomain::init, 0);
  switch (ti.kind) {
    case ThetaInit::Kind::fixed:
      if (!ti.value.empty()) state.theta = ti.value;
      break;
    case ThetaInit::Kind::random_sign:
      for (auto& v : state.theta) v = theta_rng.bernoulli(0.5) ? ti.scale : -ti.scale;
      break;
    case ThetaInit::Kind::gaussian:
      for (auto& v : state.theta) v = ti.scale * theta_rng.normal();
      break;
  }

  const auto& pi = config.init.particles;
  if (pi.kind == ParticleInit::Kind::deterministic) {
    if (pi.value.size() == d_x) {
      for (std::size_t i = 0; i < n; ++i) {
        std::copy(pi.value.begin(), pi.value.end(), state.particle(i).begin());
      }
    } else {
      state.particles = pi.value;
    }
    return state;
  }

  Vector mean(d_x, 0.0);
  switch (pi.mean) {
    case ParticleInit::Mean::zero:
      break;
    case ParticleInit::Mean::theta0:
      mean = state.theta;
      break;
    case ParticleInit::Mean::fixed:
      mean = pi.mean_value;
      break;
    case ParticleInit::Mean::random_uniform: {
      RandomStream mean_rng = RandomStream::derive(config.seed, StreamDomain::init, 1);
      for (auto& v : mean) v = mean_rng.uniform(-pi.mean_range, pi.mean_range);
      break;
    }
  }

  const double sd = std::sqrt(pi.variance);
  for (std::size_t i = 0; i < n; ++i) {
    RandomStream rng = RandomStream::derive(config.seed, StreamDomain::init, 2 + i);
    auto row = state.particle(i);
    for (std::size_t k = 0; k < d_x; ++k) {
      row[k] = pi.kind == ParticleInit::Kind::gaussian
                   ? mean[k] + sd * rng.normal()
                   : sample_generalized_gaussian(rng, mean[k], pi.variance);
    }
  }
  return state;
}

struct Sampler::Impl {
  struct Scratch {
    Vector v;
    Vector h;
    Vector xi;
  };

  const PotentialModel* model;
  TamingSpec spec;
  Tamer tamer;
  StepCoefficients coef;
  std::size_t threads;
  std::unique_ptr<tbb::task_arena> arena;
  tbb::enumerable_thread_specific<Scratch> scratch;
  Vector theta_grads;  // N x d_theta
  Vector theta_sum;
  Vector theta_xi;

  Impl(const PotentialModel& m, const RunConfig& config, const TamingSpec& taming)
      : model(&m),
        spec(taming),
        tamer(taming),
        coef(StepCoefficients::for_algorithm(config.algorithm, config.lambda,
                                             config.n_particles, taming.p_exponent)),
        threads(config.threads) {
    if (threads > 1) arena = std::make_unique<tbb::task_arena>(static_cast<int>(threads));
  }

  Scratch& local() {
    Scratch& s = scratch.local();
    if (s.v.size() != model->dim()) {
      s.v.resize(model->dim());
      s.h.resize(model->dim());
      s.xi.resize(model->d_x());
    }
    return s;
  }

  void particle_update(ParticleState& state, NoiseSource& noise, std::size_t i) {
    const std::size_t d_theta = model->d_theta();
    const std::size_t d_x = model->d_x();
    Scratch& s = local();
    auto row = state.particle(i);
    std::copy(state.theta.begin(), state.theta.end(), s.v.begin());
    std::copy(row.begin(), row.end(), s.v.begin() + static_cast<std::ptrdiff_t>(d_theta));
    model->gradient_joint(s.v, s.h);
    tamer(s.v, s.h);
    std::copy(s.h.begin(), s.h.begin() + static_cast<std::ptrdiff_t>(d_theta),
              theta_grads.begin() + static_cast<std::ptrdiff_t>(i * d_theta));
    noise.particle_noise(i, s.xi);
    for (std::size_t k = 0; k < d_x; ++k) {
      row[k] = row[k] - coef.x_drift.apply(s.h[d_theta + k]) + coef.x_noise.apply(s.xi[k]);
    }
  }

  void step(ParticleState& state, NoiseSource& noise) {
    const std::size_t n = state.n_particles;
    const std::size_t d_theta = model->d_theta();
    if (state.theta.size() != d_theta || state.d_x != model->d_x() ||
        state.particles.size() != n * state.d_x || n == 0) {
      throw ConfigError("sampler: state dimensions do not match the model");
    }
    theta_grads.resize(n * d_theta);
    theta_sum.resize(d_theta);
    theta_xi.resize(d_theta);

    if (arena) {
      arena->execute([&] {
        tbb::parallel_for(tbb::blocked_range<std::size_t>(0, n),
                          [&](const tbb::blocked_range<std::size_t>& r) {
                            for (std::size_t i = r.begin(); i != r.end(); ++i) {
                              particle_update(state, noise, i);
                            }
                          });
      });
    } else {
      for (std::size_t i = 0; i < n; ++i) particle_update(state, noise, i);
    }

    pairwise_rows(theta_grads.data(), n, d_theta, theta_sum.data());
    if (!coef.theta_noise.is_zero()) {
      noise.theta_noise(theta_xi);
      for (std::size_t k = 0; k < d_theta; ++k) {
        state.theta[k] = state.theta[k] - coef.theta_drift.apply(theta_sum[k]) +
                         coef.theta_noise.apply(theta_xi[k]);
      }
    } else {
      for (std::size_t k = 0; k < d_theta; ++k) {
        state.theta[k] = state.theta[k] - coef.theta_drift.apply(theta_sum[k]);
      }
    }

    ++state.step;
    if (!state.diverged && is_diverged(state)) {
      state.diverged = true;
      state.divergence_step = state.step;
    }
  }
};

Sampler::Sampler(const PotentialModel& model, const RunConfig& config)
    : Sampler(model, config, run_taming_spec(config, model)) {}

Sampler::Sampler(const PotentialModel& model, const RunConfig& config, const TamingSpec& taming)
    : impl_(std::make_unique<Impl>(model, config, taming)) {}

Sampler::~Sampler() = default;
Sampler::Sampler(Sampler&&) noexcept = default;
Sampler& Sampler::operator=(Sampler&&) noexcept = default;

const TamingSpec& Sampler::taming() const { return impl_->spec; }
const StepCoefficients& Sampler::coefficients() const { return impl_->coef; }

void Sampler::step(ParticleState& state, NoiseSource& noise) { impl_->step(state, noise); }

namespace {

ParticleState single_step(const ParticleState& state, const PotentialModel& model,
                          const TamingSpec& spec, RunConfig config, Algorithm algorithm,
                          NoiseSource& noise) {
  config.algorithm = algorithm;
  config.n_particles = state.n_particles;
  config.taming = spec.kind;
  Sampler sampler(model, config, spec);
  ParticleState next = state;
  sampler.step(next, noise);
  return next;
}

TamingSpec with_kind(TamingSpec spec, TamingKind kind) {
  spec.kind = kind;
  return spec;
}

}  // namespace

ParticleState step_tipla_u(const ParticleState& state, const PotentialModel& model,
                           const TamingSpec& spec, const RunConfig& config,
                           NoiseSource& noise) {
  return single_step(state, model, with_kind(spec, TamingKind::uniform), config,
                     Algorithm::tipla_u, noise);
}

ParticleState step_tipla_c(const ParticleState& state, const PotentialModel& model,
                           const TamingSpec& spec, const RunConfig& config,
                           NoiseSource& noise) {
  return single_step(state, model, with_kind(spec, TamingKind::coordinatewise), config,
                     Algorithm::tipla_c, noise);
}

ParticleState step_ipla(const ParticleState& state, const PotentialModel& model,
                        const RunConfig& config, NoiseSource& noise) {
  const TamingSpec spec =
      make_taming_spec(TamingKind::none, model, config.lambda, state.n_particles);
  return single_step(state, model, spec, config, Algorithm::ipla, noise);
}

ParticleState step_pgd(const ParticleState& state, const PotentialModel& model,
                       const RunConfig& config, NoiseSource& noise) {
  const TamingSpec spec =
      make_taming_spec(TamingKind::none, model, config.lambda, state.n_particles);
  return single_step(state, model, spec, config, Algorithm::pgd, noise);
}

Trajectory run(const RunConfig& config, const PotentialModel& model) {
  validate_run_config(config, model);
  return run(config, model, run_taming_spec(config, model));
}

Trajectory run(const RunConfig& config, const PotentialModel& model, const TamingSpec& taming) {
  ParticleState initial = init_state(config, model);
  StreamNoise noise(config.seed, config.n_particles);
  return run(config, model, taming, std::move(initial), noise);
}

Trajectory run(const RunConfig& config, const PotentialModel& model, const TamingSpec& taming,
               ParticleState initial, NoiseSource& noise) {
  validate_run_config(config, model);
  taming.validate();
  if (initial.n_particles != config.n_particles) {
    throw ConfigError("run: initial state has a different particle count");
  }

  Trajectory out;
  out.config = config;
  out.taming = taming;
  const StepsizeCheck check = check_stepsize(config, model, taming);
  if (!check.admissible) {
    const std::string message = "stepsize lambda = " + format_double(config.lambda) +
                                " violates " + check.rule + " (bound " +
                                format_double(check.bound) + ")";
    if (config.strict) throw ConfigError("run.lambda: " + message);
    out.warnings.push_back(message);
  }

  const auto start = std::chrono::steady_clock::now();
  Sampler sampler(model, config, taming);
  ParticleState state = std::move(initial);
  auto record = [&] {
    out.records.push_back({state.step, state.theta, rescaled_norm_sq(state), state.diverged});
  };
  record();
  for (std::size_t n = 0; n < config.n_steps; ++n) {
    sampler.step(state, noise);
    const bool last = n + 1 == config.n_steps;
    const bool stop = state.diverged && config.stop_on_divergence;
    if (last || stop || state.step % config.record_every == 0) record();
    if (stop) break;
  }
  out.wall_time_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  out.divergence_step = state.divergence_step;
  out.final_state = std::move(state);
  return out;
}

}  // namespace tipla
