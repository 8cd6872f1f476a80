#ifndef TIPLA_POTENTIALS_HPP_
#define TIPLA_POTENTIALS_HPP_

#include <cstddef>
#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "tipla/errors.hpp"

namespace tipla {

// Gradient of U(theta, x) split into its theta and x blocks.
struct GradientValue {
  Vector g_theta;
  Vector g_x;

  bool operator==(const GradientValue&) const = default;
};

// Which per-coordinate dissipativity condition a model satisfies.
//   separable: h_i(v) v_i >= (mu/2) v_i^2 - |h_i(0)|^2 / (2 mu) for every i.
//   paired:    d_theta == d_x and for every i the (theta_i, x_i) pair obeys
//              h^{theta_i}(v) theta_i >= (mu/2) theta_i^2 - rho x_i^2 - ...
//              h^{x_i}(v) x_i         >= (mu/2) x_i^2 - rho theta_i^2 - ...
//              with 4 rho < mu.
enum class CoordinateForm { none, separable, paired };

struct CoordinateCondition {
  CoordinateForm form = CoordinateForm::none;
  double mu = 0.0;
  double rho = 0.0;
};

// A potential U(theta, x) with an analytic gradient and the constants the
// stability theory needs. Joint vectors are always stacked as (theta, x).
//
// Derived classes are immutable after construction apart from the explicit
// constant overrides, so one instance can be shared by concurrent samplers.
class PotentialModel {
 public:
  virtual ~PotentialModel() = default;

  const std::string& name() const { return name_; }
  std::size_t d_theta() const { return d_theta_; }
  std::size_t d_x() const { return d_x_; }
  std::size_t dim() const { return d_theta_ + d_x_; }

  // Polynomial growth order ell of the gradient.
  double growth_order() const { return growth_order_; }
  // Strong-convexity constant mu.
  double convexity_mu() const { return convexity_mu_; }
  // |h(0)|, the gradient norm at the origin.
  double grad_origin_norm() const { return grad_origin_norm_; }
  // b = |h(0)|^2 / (2 mu), the dissipativity offset.
  double dissipativity_b() const {
    return grad_origin_norm_ * grad_origin_norm_ / (2.0 * convexity_mu_);
  }
  const std::optional<Vector>& known_maximizer() const { return known_maximizer_; }
  const CoordinateCondition& coordinate_condition() const { return coordinate_; }

  // Overrides used by configuration files (and by sabotage tests).
  void set_convexity_mu(double mu);
  void set_growth_order(double ell);

  // Unchecked hot path: spans must match d_theta / d_x.
  virtual void gradient(std::span<const double> theta, std::span<const double> x,
                        std::span<double> g_theta, std::span<double> g_x) const = 0;
  virtual double potential(std::span<const double> theta,
                           std::span<const double> x) const = 0;

  void gradient_joint(std::span<const double> v, std::span<double> h) const {
    gradient(v.first(d_theta_), v.subspan(d_theta_), h.first(d_theta_),
             h.subspan(d_theta_));
  }
  double potential_joint(std::span<const double> v) const {
    return potential(v.first(d_theta_), v.subspan(d_theta_));
  }

 protected:
  PotentialModel(std::string name, std::size_t d_theta, std::size_t d_x,
                 double growth_order, double convexity_mu);

  // Must be called at the end of every derived constructor.
  void finalize();

  std::optional<Vector> known_maximizer_;
  CoordinateCondition coordinate_;

 private:
  std::string name_;
  std::size_t d_theta_;
  std::size_t d_x_;
  double growth_order_;
  double convexity_mu_;
  double grad_origin_norm_ = 0.0;
};

using ModelPtr = std::shared_ptr<PotentialModel>;

// Checked gradient evaluation. Throws ConfigError on dimension mismatch and
// InputError on non-finite inputs.
GradientValue eval_gradient(const PotentialModel& model, std::span<const double> theta,
                            std::span<const double> x);

// ---------------------------------------------------------------------------
// Bayesian logistic regression with a generalized-Gaussian prior:
//   U = sum_k (x_k - theta_k)^4 / sigma^4 + (x_k - theta_k)^2 / sigma^2
//       + sum_j softplus(u_j . x) - y_j u_j . x
// (the log-partition constant is dropped).

struct LogisticData {
  std::size_t dim = 0;
  Vector covariates;        // n_data x dim, row-major
  std::vector<int> labels;  // each 0 or 1

  std::size_t size() const { return labels.size(); }
  std::span<const double> row(std::size_t j) const {
    return {covariates.data() + j * dim, dim};
  }
};

struct LogisticParams {
  double sigma2 = 0.1;
  LogisticData data;
};

GradientValue logistic_regression_gradient(const LogisticParams& params,
                                           std::span<const double> theta,
                                           std::span<const double> x);

// Covariates u_j ~ U(-1, 1)^dim. Labels: draw x from the prior centred at
// theta_star, then y_j ~ Bernoulli(s(u_j . x)).
LogisticData synthesize_logistic_data(std::size_t dim, std::size_t n_data, double sigma2,
                                      std::span<const double> theta_star,
                                      std::uint64_t seed);

// CSV with `dim` feature columns followed by one 0/1 label column. A header
// row is skipped when its first field is not numeric.
LogisticData load_logistic_csv(const std::string& path);

class LogisticRegressionModel final : public PotentialModel {
 public:
  LogisticRegressionModel(LogisticParams params, std::optional<Vector> theta_star = {});

  const LogisticParams& params() const { return params_; }

  void gradient(std::span<const double> theta, std::span<const double> x,
                std::span<double> g_theta, std::span<double> g_x) const override;
  double potential(std::span<const double> theta,
                   std::span<const double> x) const override;

 private:
  LogisticParams params_;
};

// ---------------------------------------------------------------------------
// Highly superlinear toy potential of order m:
//   U = |x|^{4m} + (|x|^{2m}+1)(|theta|^{2m}+1) + |theta|^{4m}
//     + |x|^4 + (|x|^2+1)(|theta|^2+1) + |theta|^4
// Maximiser theta* = 0, ell = 4m - 2, mu = 2.

GradientValue higher_order_toy_gradient(int m, std::span<const double> theta,
                                        std::span<const double> x);

class HigherOrderToyModel final : public PotentialModel {
 public:
  HigherOrderToyModel(int m, std::size_t d_theta, std::size_t d_x);

  int order() const { return m_; }

  void gradient(std::span<const double> theta, std::span<const double> x,
                std::span<double> g_theta, std::span<double> g_x) const override;
  double potential(std::span<const double> theta,
                   std::span<const double> x) const override;

 private:
  int m_;
};

// ---------------------------------------------------------------------------
// Toy potential with a cross term (requires d_theta == d_x):
//   U = <x, theta> + |x|^4 + (|x|^2+1)(|theta|^2+1) + |theta|^4
// ell = 3, mu = 1; satisfies the paired coordinate condition with
// mu = 3, rho = 1/2 but not the separable one.

GradientValue mixed_term_toy_gradient(std::span<const double> theta,
                                      std::span<const double> x);

class MixedTermToyModel final : public PotentialModel {
 public:
  explicit MixedTermToyModel(std::size_t d);

  void gradient(std::span<const double> theta, std::span<const double> x,
                std::span<double> g_theta, std::span<double> g_x) const override;
  double potential(std::span<const double> theta,
                   std::span<const double> x) const override;
};

// ---------------------------------------------------------------------------
// Ground-truth model U = |x - theta|^2 / 2 + |theta|^2 / 2 (d_theta == d_x).
// The theta-marginal of the N-particle invariant measure is N(0, I / N).
// mu = (3 - sqrt 5) / 2, the smallest eigenvalue of [[2, -1], [-1, 1]].

GradientValue quadratic_diagnostic_gradient(std::span<const double> theta,
                                            std::span<const double> x);

class QuadraticModel final : public PotentialModel {
 public:
  explicit QuadraticModel(std::size_t d);

  void gradient(std::span<const double> theta, std::span<const double> x,
                std::span<double> g_theta, std::span<double> g_x) const override;
  double potential(std::span<const double> theta,
                   std::span<const double> x) const override;
};

inline constexpr double kQuadraticMu = 0.38196601125010515;  // (3 - sqrt 5) / 2

}  // namespace tipla

#endif  // TIPLA_POTENTIALS_HPP_
