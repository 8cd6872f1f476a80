#include "oracles.hpp"

#include <cmath>

namespace oracle {

Vector fd_gradient(const std::function<double(std::span<const double>)>& f,
                   std::span<const double> point, double h) {
  Vector p(point.begin(), point.end());
  Vector g(p.size());
  auto central = [&](std::size_t k, double step) {
    const double keep = p[k];
    p[k] = keep + step;
    const double up = f(p);
    p[k] = keep - step;
    const double down = f(p);
    p[k] = keep;
    return (up - down) / (2.0 * step);
  };
  for (std::size_t k = 0; k < p.size(); ++k) {
    const double step = h * std::max(1.0, std::abs(p[k]));
    const double d1 = central(k, step);
    const double d2 = central(k, step / 2.0);
    g[k] = (4.0 * d2 - d1) / 3.0;
  }
  return g;
}

std::pair<double, double> sym2x2_eigenvalues(double a, double b, double c) {
  const double mean = 0.5 * (a + c);
  const double radius = std::sqrt(0.25 * (a - c) * (a - c) + b * b);
  return {mean - radius, mean + radius};
}

ScalarState quadratic_scalar_step(Scheme scheme, ScalarState s, double lambda, double xi0,
                                  double xi1) {
  const double mu = (3.0 - std::sqrt(5.0)) / 2.0;
  double ht = 2.0 * s.theta - s.x;
  double hx = s.x - s.theta;
  if (scheme == Scheme::tipla_u) {
    // N = 1: the N^{-p/2} factor is one.
    const double st = ht - mu * s.theta;
    const double sx = hx - mu * s.x;
    const double denom = 1.0 + std::sqrt(lambda) * std::sqrt(st * st + sx * sx);
    ht = st / denom + mu * s.theta;
    hx = sx / denom + mu * s.x;
  } else if (scheme == Scheme::tipla_c) {
    const double st = ht - mu * s.theta;
    const double sx = hx - mu * s.x;
    ht = st / (1.0 + std::sqrt(lambda) * std::abs(st)) + mu * s.theta;
    hx = sx / (1.0 + std::sqrt(lambda) * std::abs(sx)) + mu * s.x;
  }
  const double theta_noise = scheme == Scheme::pgd ? 0.0 : std::sqrt(2.0 * lambda) * xi0;
  return {s.theta - lambda * ht + theta_noise, s.x - lambda * hx + std::sqrt(2.0 * lambda) * xi1};
}

ZeroModel::ZeroModel(std::size_t d_theta, std::size_t d_x, double ell, double mu)
    : PotentialModel("zero", d_theta, d_x, ell, mu) {
  finalize();
}

void ZeroModel::gradient(std::span<const double>, std::span<const double>,
                         std::span<double> g_theta, std::span<double> g_x) const {
  for (auto& v : g_theta) v = 0.0;
  for (auto& v : g_x) v = 0.0;
}

double ZeroModel::potential(std::span<const double>, std::span<const double>) const {
  return 0.0;
}

LinearModel::LinearModel(std::size_t d_theta, std::size_t d_x, double mu)
    : PotentialModel("linear", d_theta, d_x, 1.0, mu) {
  finalize();
}

void LinearModel::gradient(std::span<const double> theta, std::span<const double> x,
                           std::span<double> g_theta, std::span<double> g_x) const {
  for (std::size_t k = 0; k < theta.size(); ++k) g_theta[k] = convexity_mu() * theta[k];
  for (std::size_t k = 0; k < x.size(); ++k) g_x[k] = convexity_mu() * x[k];
}

double LinearModel::potential(std::span<const double> theta, std::span<const double> x) const {
  double s = 0.0;
  for (double v : theta) s += v * v;
  for (double v : x) s += v * v;
  return 0.5 * convexity_mu() * s;
}

void CapturedNoise::theta_noise(std::span<double> out) {
  const Vector& row = theta_rows.at(theta_step_++);
  for (std::size_t k = 0; k < out.size(); ++k) out[k] = row.at(k);
}

void CapturedNoise::particle_noise(std::size_t i, std::span<double> out) {
  if (particle_step_.size() <= i) particle_step_.resize(i + 1, 0);
  const Vector& row = particle_rows.at(particle_step_[i]++).at(i);
  for (std::size_t k = 0; k < out.size(); ++k) out[k] = row.at(k);
}

void RecordingNoise::theta_noise(std::span<double> out) {
  inner_.theta_noise(out);
  theta_draws.emplace_back(out.begin(), out.end());
}

}  // namespace oracle
