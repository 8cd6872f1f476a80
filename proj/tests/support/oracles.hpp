#ifndef TIPLA_TESTS_ORACLES_HPP_
#define TIPLA_TESTS_ORACLES_HPP_

// Independent reference implementations. These are written from the
// defining formulas and share no code with the library beyond the model
// interface, so agreement is meaningful.

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

#include "tipla/potentials.hpp"
#include "tipla/sampler.hpp"

namespace oracle {

using tipla::Vector;

// Richardson-extrapolated central differences of a scalar function.
Vector fd_gradient(const std::function<double(std::span<const double>)>& f,
                   std::span<const double> point, double h = 1e-4);

// Eigenvalues of a symmetric 2x2 matrix [[a, b], [b, c]], ascending.
std::pair<double, double> sym2x2_eigenvalues(double a, double b, double c);

enum class Scheme { tipla_u, tipla_c, ipla, pgd };

// One step of the quadratic model U = (x - t)^2 / 2 + t^2 / 2 with N = 1,
// d = 1 written out by hand. ell = 1, so p = 3 and mu = (3 - sqrt 5) / 2.
struct ScalarState {
  double theta;
  double x;
};
ScalarState quadratic_scalar_step(Scheme scheme, ScalarState s, double lambda, double xi0,
                                  double xi1);

// h == 0 everywhere.
class ZeroModel final : public tipla::PotentialModel {
 public:
  ZeroModel(std::size_t d_theta, std::size_t d_x, double ell = 1.0, double mu = 1.0);
  void gradient(std::span<const double>, std::span<const double>, std::span<double> g_theta,
                std::span<double> g_x) const override;
  double potential(std::span<const double>, std::span<const double>) const override;
};

// h(v) = mu v, the line on which taming is the identity.
class LinearModel final : public tipla::PotentialModel {
 public:
  LinearModel(std::size_t d_theta, std::size_t d_x, double mu);
  void gradient(std::span<const double> theta, std::span<const double> x,
                std::span<double> g_theta, std::span<double> g_x) const override;
  double potential(std::span<const double> theta, std::span<const double> x) const override;
};

// Replays fixed per-step noise: theta_rows[k] for theta at step k and
// particle_rows[k][i] for particle i. Single-threaded use only.
class CapturedNoise final : public tipla::NoiseSource {
 public:
  std::vector<Vector> theta_rows;
  std::vector<std::vector<Vector>> particle_rows;

  void theta_noise(std::span<double> out) override;
  void particle_noise(std::size_t i, std::span<double> out) override;

 private:
  std::size_t theta_step_ = 0;
  std::vector<std::size_t> particle_step_;
};

// Draws into a buffer for later inspection while forwarding another source.
class RecordingNoise final : public tipla::NoiseSource {
 public:
  explicit RecordingNoise(tipla::NoiseSource& inner) : inner_(inner) {}
  std::vector<Vector> theta_draws;

  void theta_noise(std::span<double> out) override;
  void particle_noise(std::size_t i, std::span<double> out) override {
    inner_.particle_noise(i, out);
  }

 private:
  tipla::NoiseSource& inner_;
};

}  // namespace oracle

#endif  // TIPLA_TESTS_ORACLES_HPP_
