#include <gtest/gtest.h>

#include <cmath>
#include <numeric>

#include "oracles.hpp"
#include "tipla/config.hpp"
#include "tipla/sampler.hpp"

using namespace tipla;

namespace {

RunConfig base_config(Algorithm algorithm, double lambda, std::size_t n) {
  RunConfig c;
  c.algorithm = algorithm;
  c.lambda = lambda;
  c.n_particles = n;
  c.n_steps = 100;
  c.seed = 3;
  return c;
}

ParticleState scalar_state(double theta, double x) {
  ParticleState s;
  s.theta = {theta};
  s.particles = {x};
  s.n_particles = 1;
  s.d_x = 1;
  return s;
}

oracle::Scheme as_scheme(Algorithm a) {
  switch (a) {
    case Algorithm::tipla_u:
      return oracle::Scheme::tipla_u;
    case Algorithm::tipla_c:
      return oracle::Scheme::tipla_c;
    case Algorithm::ipla:
      return oracle::Scheme::ipla;
    default:
      return oracle::Scheme::pgd;
  }
}

}  // namespace

TEST(Sampler, MatchesHandWrittenScalarSchemes) {
  QuadraticModel model(1);
  for (Algorithm a : {Algorithm::tipla_u, Algorithm::tipla_c, Algorithm::ipla, Algorithm::pgd}) {
    const double lambda = 0.05;
    const auto config = base_config(a, lambda, 1);
    Sampler sampler(model, config);
    ParticleState state = scalar_state(3.0, -2.0);
    oracle::ScalarState ref{3.0, -2.0};
    RandomStream rng(99);
    oracle::CapturedNoise noise;
    for (int k = 0; k < 50; ++k) {
      noise.theta_rows.push_back({rng.normal()});
      noise.particle_rows.push_back({{rng.normal()}});
    }
    for (int k = 0; k < 50; ++k) {
      sampler.step(state, noise);
      ref = oracle::quadratic_scalar_step(as_scheme(a), ref, lambda, noise.theta_rows[k][0],
                                          noise.particle_rows[k][0][0]);
      ASSERT_NEAR(state.theta[0], ref.theta, 1e-12 * (1.0 + std::abs(ref.theta))) << to_string(a);
      ASSERT_NEAR(state.particles[0], ref.x, 1e-12 * (1.0 + std::abs(ref.x))) << to_string(a);
    }
  }
}

TEST(Sampler, ZeroGradientGivesPureNoiseUpdate) {
  oracle::ZeroModel model(1, 1, 1.0, 1.0);
  for (Algorithm a : {Algorithm::tipla_u, Algorithm::tipla_c, Algorithm::ipla}) {
    const std::size_t n = 4;
    const double lambda = 0.01;
    auto config = base_config(a, lambda, n);
    config.init.particles.kind = ParticleInit::Kind::deterministic;
    config.init.particles.value = {0.0};
    Sampler sampler(model, config);
    ParticleState state = init_state(config, model);
    oracle::CapturedNoise noise;
    noise.theta_rows = {{0.5}};
    noise.particle_rows = {{{1.0}, {-1.0}, {2.0}, {0.25}}};
    sampler.step(state, noise);
    const double p = 3.0;
    const double theta_sd = a == Algorithm::tipla_u ? std::sqrt(2 * lambda / std::pow(n, p + 1))
                                                    : std::sqrt(2 * lambda / n);
    const double x_sd =
        a == Algorithm::tipla_u ? std::sqrt(2 * lambda / std::pow(n, p)) : std::sqrt(2 * lambda);
    EXPECT_NEAR(state.theta[0], 0.5 * theta_sd, 1e-15);
    EXPECT_NEAR(state.particles[2], 2.0 * x_sd, 1e-15);
    EXPECT_NEAR(state.particles[1], -x_sd, 1e-15);
  }
}

TEST(Sampler, NoiseVarianceOverManySteps) {
  oracle::ZeroModel model(1, 1, 1.0, 1.0);
  const std::size_t n = 10;
  const double lambda = 0.01;
  auto config = base_config(Algorithm::tipla_c, lambda, n);
  config.init.particles.kind = ParticleInit::Kind::deterministic;
  config.init.particles.value = {0.0};
  Sampler sampler(model, config);
  StreamNoise noise(7, n);
  ParticleState state = init_state(config, model);
  const int steps = 100000;
  double sum2 = 0.0;
  double prev = 0.0;
  for (int k = 0; k < steps; ++k) {
    sampler.step(state, noise);
    const double inc = state.theta[0] - prev;
    prev = state.theta[0];
    sum2 += inc * inc;
  }
  const double expected = 2 * lambda / n;
  // se of a chi-square mean: expected * sqrt(2 / steps)
  EXPECT_NEAR(sum2 / steps, expected, 5.0 * expected * std::sqrt(2.0 / steps));
}

TEST(Sampler, PgdLeavesThetaFixedUnderZeroGradient) {
  oracle::ZeroModel model(2, 2);
  auto config = base_config(Algorithm::pgd, 0.1, 3);
  config.init.theta.value = {1.5, -2.5};
  config.n_steps = 200;
  const auto traj = run(config, model);
  EXPECT_EQ(traj.final_state.theta, (Vector{1.5, -2.5}));
  EXPECT_NE(traj.final_state.particles, init_state(config, model).particles);
}

TEST(Sampler, CoordinatewiseWithoutTamingEqualsIpla) {
  const auto model = build_default_model("mixed");
  auto a = base_config(Algorithm::tipla_c, 1e-3, 5);
  a.taming = TamingKind::none;
  auto b = base_config(Algorithm::ipla, 1e-3, 5);
  a.init.theta.value = b.init.theta.value = {0.5, -0.5};
  a.init.particles.mean = b.init.particles.mean = ParticleInit::Mean::theta0;
  const auto ta = run(a, *model);
  const auto tb = run(b, *model);
  EXPECT_EQ(ta.final_state.theta, tb.final_state.theta);
  EXPECT_EQ(ta.final_state.particles, tb.final_state.particles);
}

TEST(Sampler, ThreadCountDoesNotChangeResults) {
  const auto model = build_default_model("toy");
  auto config = base_config(Algorithm::tipla_c, 1e-3, 64);
  config.n_steps = 50;
  const auto one = run(config, *model);
  for (std::size_t threads : {2u, 4u}) {
    config.threads = threads;
    const auto many = run(config, *model);
    EXPECT_EQ(many.final_state.theta, one.final_state.theta);
    EXPECT_EQ(many.final_state.particles, one.final_state.particles);
  }
}

TEST(Sampler, SameSeedSameTrajectory) {
  QuadraticModel model(2);
  const auto config = base_config(Algorithm::tipla_u, 1e-2, 8);
  const auto a = run(config, model);
  const auto b = run(config, model);
  ASSERT_EQ(a.records.size(), b.records.size());
  for (std::size_t r = 0; r < a.records.size(); ++r) {
    EXPECT_EQ(a.records[r].theta, b.records[r].theta);
  }
  auto other = config;
  other.seed = 4;
  EXPECT_NE(run(other, model).final_state.theta, a.final_state.theta);
}

TEST(Sampler, ParticlesAreExchangeable) {
  QuadraticModel model(2);
  const std::size_t n = 5;
  auto config = base_config(Algorithm::tipla_c, 1e-2, n);
  ParticleState initial = init_state(config, model);
  const std::vector<std::size_t> perm{3, 0, 4, 1, 2};  // particle i takes the role of perm[i]

  ParticleState permuted = initial;
  std::vector<std::size_t> streams(n);
  for (std::size_t i = 0; i < n; ++i) {
    const auto src = initial.particle(perm[i]);
    std::copy(src.begin(), src.end(), permuted.particle(i).begin());
    streams[i] = perm[i] + 1;
  }
  const auto spec = run_taming_spec(config, model);
  StreamNoise plain(config.seed, n);
  StreamNoise shuffled(config.seed, std::span<const std::size_t>(streams));
  const auto a = run(config, model, spec, initial, plain);
  const auto b = run(config, model, spec, permuted, shuffled);
  for (std::size_t k = 0; k < 2; ++k) {
    EXPECT_NEAR(a.final_state.theta[k], b.final_state.theta[k], 1e-12);
  }
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t k = 0; k < 2; ++k) {
      EXPECT_NEAR(b.final_state.particle(i)[k], a.final_state.particle(perm[i])[k], 1e-12);
    }
  }
}

TEST(Sampler, ZeroStepsRecordsOnlyTheInitialState) {
  QuadraticModel model(2);
  auto config = base_config(Algorithm::ipla, 1e-2, 3);
  config.n_steps = 0;
  config.init.theta.value = {1.0, 2.0};
  const auto traj = run(config, model);
  ASSERT_EQ(traj.records.size(), 1u);
  EXPECT_EQ(traj.records[0].step, 0u);
  EXPECT_EQ(traj.final_state.theta, (Vector{1.0, 2.0}));
}

TEST(Sampler, RecordThinningKeepsFirstAndLast) {
  QuadraticModel model(1);
  auto config = base_config(Algorithm::ipla, 1e-2, 2);
  config.n_steps = 25;
  config.record_every = 10;
  const auto traj = run(config, model);
  std::vector<std::size_t> steps;
  for (const auto& r : traj.records) steps.push_back(r.step);
  EXPECT_EQ(steps, (std::vector<std::size_t>{0, 10, 20, 25}));
}

TEST(Sampler, RescaledNormExample) {
  ParticleState s;
  s.theta = {1.0, 1.0};
  s.particles = {2.0, 0.0, 0.0, 2.0};
  s.n_particles = 2;
  s.d_x = 2;
  // 2 + (4 + 4) / 2
  EXPECT_DOUBLE_EQ(rescaled_norm_sq(s), 6.0);
}

TEST(Sampler, DivergenceDetectedAndStopped) {
  const auto model = build_default_model("toy");
  auto config = base_config(Algorithm::ipla, 0.5, 2);
  config.init.theta.value = {20.0, -20.0};
  config.stop_on_divergence = true;
  config.n_steps = 1000;
  const auto traj = run(config, *model);
  ASSERT_TRUE(traj.divergence_step.has_value());
  EXPECT_TRUE(traj.records.back().diverged);
  EXPECT_EQ(traj.records.back().step, *traj.divergence_step);
  EXPECT_LT(*traj.divergence_step, 1000u);
}

TEST(Sampler, TamedSchemeSurvivesTheSameStart) {
  const auto model = build_default_model("toy");
  auto config = base_config(Algorithm::tipla_c, 0.05, 2);
  config.init.theta.value = {20.0, -20.0};
  config.n_steps = 1000;
  const auto traj = run(config, *model);
  EXPECT_FALSE(traj.divergence_step.has_value());
  EXPECT_TRUE(std::isfinite(traj.final_state.theta[0]));
}

TEST(Stepsize, Bounds) {
  const auto toy = build_default_model("toy");
  const auto mixed = build_default_model("mixed");
  auto c = base_config(Algorithm::tipla_c, 0.1, 1);
  auto check = check_stepsize(c, *toy, run_taming_spec(c, *toy));
  EXPECT_DOUBLE_EQ(check.bound, 1.0 / 8.0);
  EXPECT_TRUE(check.admissible);
  check = check_stepsize(c, *mixed, run_taming_spec(c, *mixed));
  EXPECT_DOUBLE_EQ(check.bound, 1.0 / 8.0);
  EXPECT_TRUE(check.admissible);
  c.lambda = 0.2;
  EXPECT_FALSE(check_stepsize(c, *toy, run_taming_spec(c, *toy)).admissible);

  auto u = base_config(Algorithm::tipla_u, 0.5, 1);
  EXPECT_FALSE(check_stepsize(u, *toy, run_taming_spec(u, *toy)).admissible);
  u.n_particles = 2;  // bound 2^5 / 8 = 4
  check = check_stepsize(u, *toy, run_taming_spec(u, *toy));
  EXPECT_TRUE(check.admissible);
  EXPECT_NEAR(check.bound, 4.0, 1e-12);

  auto i = base_config(Algorithm::ipla, 100.0, 1);
  EXPECT_TRUE(check_stepsize(i, *toy, run_taming_spec(i, *toy)).admissible);
}

TEST(Stepsize, StrictTurnsWarningIntoError) {
  const auto toy = build_default_model("toy");
  auto c = base_config(Algorithm::tipla_u, 0.5, 1);
  c.n_steps = 1;
  const auto traj = run(c, *toy);
  EXPECT_EQ(traj.warnings.size(), 1u);
  c.strict = true;
  EXPECT_THROW(run(c, *toy), ConfigError);
}

TEST(Coefficients, LogSpaceForHugeExponent) {
  const auto c = StepCoefficients::for_algorithm(Algorithm::tipla_u, 1e-4, 1000, 117.0);
  EXPECT_NEAR(c.theta_drift.log(), std::log(1e-4) - 118.0 * std::log(1000.0), 1e-9);
  EXPECT_NEAR(c.x_noise.log(), 0.5 * std::log(2e-4) - 58.5 * std::log(1000.0), 1e-9);
  EXPECT_TRUE(StepCoefficients::for_algorithm(Algorithm::pgd, 1e-2, 4, 3.0).theta_noise.is_zero());
}

TEST(Validation, RejectsBadConfigs) {
  QuadraticModel model(2);
  auto c = base_config(Algorithm::ipla, 0.0, 1);
  EXPECT_THROW(validate_run_config(c, model), ConfigError);
  c.lambda = 1e-3;
  c.n_particles = 0;
  EXPECT_THROW(validate_run_config(c, model), ConfigError);
  c.n_particles = 1;
  c.init.theta.value = {1.0};
  EXPECT_THROW(validate_run_config(c, model), ConfigError);
  c.init.theta.value = {};
  c.init.particles.kind = ParticleInit::Kind::deterministic;
  c.init.particles.value = {1.0, 2.0, 3.0};
  EXPECT_THROW(validate_run_config(c, model), ConfigError);
  EXPECT_FALSE(parse_algorithm("langevin").has_value());
  EXPECT_EQ(parse_algorithm("tipla_u"), Algorithm::tipla_u);
}

TEST(Init, DeterministicAndRandomMean) {
  QuadraticModel model(2);
  auto c = base_config(Algorithm::ipla, 1e-3, 3);
  c.init.particles.kind = ParticleInit::Kind::deterministic;
  c.init.particles.value = {1, 2, 3, 4, 5, 6};
  EXPECT_EQ(init_state(c, model).particles, (Vector{1, 2, 3, 4, 5, 6}));

  c.init.particles = {};
  c.init.particles.mean = ParticleInit::Mean::random_uniform;
  c.init.particles.mean_range = 10.0;
  c.init.particles.variance = 0.0;
  const auto s = init_state(c, model);
  EXPECT_EQ(s.particle(0)[0], s.particle(2)[0]);
  EXPECT_LE(std::abs(s.particle(0)[0]), 10.0);
}
