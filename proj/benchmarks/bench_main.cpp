#include <benchmark/benchmark.h>

#include "tipla/config.hpp"
#include "tipla/sampler.hpp"
#include "tipla/taming.hpp"

using namespace tipla;

namespace {

ModelPtr toy(int m, std::size_t d_x) {
  ModelConfig c;
  c.name = "toy";
  c.m = m;
  c.d_theta = 2;
  c.d_x = d_x;
  return build_model(c);
}

Vector point(std::size_t dim) {
  RandomStream rng(1);
  Vector v(dim);
  sample_ball(rng, 1.0, v);
  return v;
}

void BM_Gradient(benchmark::State& state, const std::string& name) {
  const auto model = name == "toy15" ? toy(15, 100) : build_default_model(name);
  const Vector v = point(model->dim());
  Vector h(model->dim());
  for (auto _ : state) {
    model->gradient_joint(v, h);
    benchmark::DoNotOptimize(h.data());
  }
}
BENCHMARK_CAPTURE(BM_Gradient, toy, std::string("toy"));
BENCHMARK_CAPTURE(BM_Gradient, toy15_dx100, std::string("toy15"));
BENCHMARK_CAPTURE(BM_Gradient, mixed, std::string("mixed"));
BENCHMARK_CAPTURE(BM_Gradient, logistic, std::string("logistic"));

void BM_Tame(benchmark::State& state, TamingKind kind) {
  const auto model = toy(1, 100);
  const Vector v = point(model->dim());
  Vector raw(model->dim());
  model->gradient_joint(v, raw);
  const Tamer tamer(make_taming_spec(kind, *model, 1e-4, 100));
  Vector h(raw.size());
  for (auto _ : state) {
    h = raw;
    tamer(v, h);
    benchmark::DoNotOptimize(h.data());
  }
}
BENCHMARK_CAPTURE(BM_Tame, uniform, TamingKind::uniform);
BENCHMARK_CAPTURE(BM_Tame, coordinatewise, TamingKind::coordinatewise);

void BM_Step(benchmark::State& state) {
  const auto model = toy(1, 100);
  RunConfig config;
  config.algorithm = Algorithm::tipla_c;
  config.lambda = 1e-4;
  config.n_particles = static_cast<std::size_t>(state.range(0));
  config.threads = static_cast<std::size_t>(state.range(1));
  Sampler sampler(*model, config);
  ParticleState s = init_state(config, *model);
  StreamNoise noise(1, config.n_particles);
  for (auto _ : state) sampler.step(s, noise);
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_Step)->Args({10, 1})->Args({100, 1})->Args({1000, 1})->Args({1000, 4});

}  // namespace
BENCHMARK_MAIN();
