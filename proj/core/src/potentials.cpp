#include "tipla/potentials.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>
#include <string_view>

#include "tipla/rng.hpp"

namespace tipla {

namespace {

double squared_norm(std::span<const double> v) {
  double sum = 0.0;
  for (double value : v) sum += value * value;
  return sum;
}

// base^exponent for small non-negative integer exponents.
double ipow(double base, int exponent) {
  double result = 1.0;
  while (exponent > 0) {
    if (exponent & 1) result *= base;
    base *= base;
    exponent >>= 1;
  }
  return result;
}

double sigmoid(double t) {
  if (t >= 0.0) return 1.0 / (1.0 + std::exp(-t));
  const double e = std::exp(t);
  return e / (1.0 + e);
}

double softplus(double t) { return std::max(t, 0.0) + std::log1p(std::exp(-std::abs(t))); }

double dot(std::span<const double> a, std::span<const double> b) {
  double sum = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) sum += a[k] * b[k];
  return sum;
}

void require_equal_dims(std::size_t d_theta, std::size_t d_x, const char* what) {
  if (d_theta != d_x) {
    throw ConfigError(std::string(what) + " requires d_theta == d_x (got " +
                      std::to_string(d_theta) + " and " + std::to_string(d_x) + ")");
  }
}

void toy_kernel(int m, std::span<const double> theta, std::span<const double> x,
                std::span<double> g_theta, std::span<double> g_x) {
  const double r2x = squared_norm(x);
  const double r2t = squared_norm(theta);
  const double mm = static_cast<double>(m);
  const double cx = 4.0 * mm * ipow(r2x, 2 * m - 1) +
                    2.0 * mm * (ipow(r2t, m) + 1.0) * ipow(r2x, m - 1) + 4.0 * r2x +
                    2.0 * (r2t + 1.0);
  const double ct = 4.0 * mm * ipow(r2t, 2 * m - 1) +
                    2.0 * mm * (ipow(r2x, m) + 1.0) * ipow(r2t, m - 1) + 4.0 * r2t +
                    2.0 * (r2x + 1.0);
  for (std::size_t k = 0; k < x.size(); ++k) g_x[k] = cx * x[k];
  for (std::size_t k = 0; k < theta.size(); ++k) g_theta[k] = ct * theta[k];
}

void mixed_kernel(std::span<const double> theta, std::span<const double> x,
                  std::span<double> g_theta, std::span<double> g_x) {
  const double r2x = squared_norm(x);
  const double r2t = squared_norm(theta);
  const double cx = 4.0 * r2x + 2.0 * (r2t + 1.0);
  const double ct = 4.0 * r2t + 2.0 * (r2x + 1.0);
  for (std::size_t k = 0; k < x.size(); ++k) {
    g_x[k] = cx * x[k] + theta[k];
    g_theta[k] = ct * theta[k] + x[k];
  }
}

void quadratic_kernel(std::span<const double> theta, std::span<const double> x,
                      std::span<double> g_theta, std::span<double> g_x) {
  for (std::size_t k = 0; k < x.size(); ++k) {
    const double diff = x[k] - theta[k];
    g_x[k] = diff;
    g_theta[k] = theta[k] - diff;
  }
}

void logistic_kernel(const LogisticParams& params, std::span<const double> theta,
                     std::span<const double> x, std::span<double> g_theta,
                     std::span<double> g_x) {
  const double inv_s2 = 1.0 / params.sigma2;
  const double inv_s4 = inv_s2 * inv_s2;
  for (std::size_t k = 0; k < x.size(); ++k) {
    const double d = x[k] - theta[k];
    const double prior = 4.0 * inv_s4 * d * d * d + 2.0 * inv_s2 * d;
    g_x[k] = prior;
    g_theta[k] = -prior;
  }
  const LogisticData& data = params.data;
  for (std::size_t j = 0; j < data.size(); ++j) {
    const auto u = data.row(j);
    const double residual = sigmoid(dot(u, x)) - static_cast<double>(data.labels[j]);
    for (std::size_t k = 0; k < x.size(); ++k) g_x[k] += u[k] * residual;
  }
}

void check_logistic(const LogisticParams& params) {
  if (!(params.sigma2 > 0.0) || !std::isfinite(params.sigma2)) {
    throw ConfigError("logistic model requires sigma2 > 0");
  }
  const LogisticData& data = params.data;
  if (data.dim == 0) throw ConfigError("logistic data has zero feature dimension");
  if (data.covariates.size() != data.dim * data.labels.size()) {
    throw ConfigError("logistic covariates and labels have mismatched sizes");
  }
  for (int label : data.labels) {
    if (label != 0 && label != 1) throw ConfigError("logistic labels must be 0 or 1");
  }
}

void check_dims(std::span<const double> theta, std::span<const double> x,
                std::size_t d_theta, std::size_t d_x) {
  if (theta.size() != d_theta || x.size() != d_x) {
    throw ConfigError("dimension mismatch: expected (" + std::to_string(d_theta) + ", " +
                      std::to_string(d_x) + "), got (" + std::to_string(theta.size()) +
                      ", " + std::to_string(x.size()) + ")");
  }
}

void check_finite(std::span<const double> v, const char* what) {
  for (double value : v) {
    if (!std::isfinite(value)) throw InputError(std::string("non-finite ") + what);
  }
}

GradientValue make_gradient(std::size_t d_theta, std::size_t d_x) {
  return {Vector(d_theta, 0.0), Vector(d_x, 0.0)};
}

}  // namespace

// ---------------------------------------------------------------------------

PotentialModel::PotentialModel(std::string name, std::size_t d_theta, std::size_t d_x,
                               double growth_order, double convexity_mu)
    : name_(std::move(name)),
      d_theta_(d_theta),
      d_x_(d_x),
      growth_order_(growth_order),
      convexity_mu_(convexity_mu) {
  if (d_theta == 0 || d_x == 0) throw ConfigError(name_ + ": dimensions must be >= 1");
  if (!(growth_order > 0.0)) throw ConfigError(name_ + ": growth order must be > 0");
  if (!(convexity_mu > 0.0)) throw ConfigError(name_ + ": convexity mu must be > 0");
}

void PotentialModel::finalize() {
  Vector v(dim(), 0.0);
  Vector h(dim(), 0.0);
  gradient_joint(v, h);
  grad_origin_norm_ = std::sqrt(squared_norm(h));
}

void PotentialModel::set_convexity_mu(double mu) {
  if (!(mu > 0.0) || !std::isfinite(mu)) throw ConfigError(name_ + ": mu must be > 0");
  convexity_mu_ = mu;
}

void PotentialModel::set_growth_order(double ell) {
  if (!(ell > 0.0) || !std::isfinite(ell)) throw ConfigError(name_ + ": ell must be > 0");
  growth_order_ = ell;
}

GradientValue eval_gradient(const PotentialModel& model, std::span<const double> theta,
                            std::span<const double> x) {
  check_dims(theta, x, model.d_theta(), model.d_x());
  check_finite(theta, "theta");
  check_finite(x, "x");
  GradientValue g = make_gradient(model.d_theta(), model.d_x());
  model.gradient(theta, x, g.g_theta, g.g_x);
  return g;
}

// ---------------------------------------------------------------------------
// Logistic regression

GradientValue logistic_regression_gradient(const LogisticParams& params,
                                           std::span<const double> theta,
                                           std::span<const double> x) {
  check_logistic(params);
  check_dims(theta, x, params.data.dim, params.data.dim);
  check_finite(theta, "theta");
  check_finite(x, "x");
  GradientValue g = make_gradient(theta.size(), x.size());
  logistic_kernel(params, theta, x, g.g_theta, g.g_x);
  return g;
}

LogisticData synthesize_logistic_data(std::size_t dim, std::size_t n_data, double sigma2,
                                      std::span<const double> theta_star,
                                      std::uint64_t seed) {
  if (dim == 0) throw ConfigError("logistic data dimension must be >= 1");
  if (!(sigma2 > 0.0)) throw ConfigError("logistic model requires sigma2 > 0");
  if (theta_star.size() != dim) {
    throw ConfigError("theta_star length " + std::to_string(theta_star.size()) +
                      " does not match dimension " + std::to_string(dim));
  }
  RandomStream rng = RandomStream::derive(seed, StreamDomain::data);
  LogisticData data;
  data.dim = dim;
  data.covariates.resize(n_data * dim);
  for (double& u : data.covariates) u = rng.uniform(-1.0, 1.0);

  Vector latent(dim);
  for (std::size_t k = 0; k < dim; ++k) {
    latent[k] = sample_generalized_gaussian(rng, theta_star[k], sigma2);
  }
  data.labels.resize(n_data);
  for (std::size_t j = 0; j < n_data; ++j) {
    data.labels[j] = rng.bernoulli(sigmoid(dot(data.row(j), latent))) ? 1 : 0;
  }
  return data;
}

LogisticData load_logistic_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open logistic data file '" + path + "'");
  LogisticData data;
  std::string line;
  std::size_t line_no = 0;
  std::size_t columns = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.find_first_not_of(" \t") == std::string::npos) continue;
    std::vector<double> fields;
    std::stringstream ss(line);
    std::string cell;
    bool numeric = true;
    while (std::getline(ss, cell, ',')) {
      const auto first = cell.find_first_not_of(" \t");
      const auto last = cell.find_last_not_of(" \t");
      std::string_view trimmed =
          first == std::string::npos
              ? std::string_view{}
              : std::string_view(cell).substr(first, last - first + 1);
      double value = 0.0;
      const auto [ptr, ec] =
          std::from_chars(trimmed.data(), trimmed.data() + trimmed.size(), value);
      if (ec != std::errc{} || ptr != trimmed.data() + trimmed.size() || trimmed.empty()) {
        numeric = false;
        break;
      }
      fields.push_back(value);
    }
    if (!numeric) {
      if (columns == 0 && data.labels.empty()) continue;  // header
      throw ConfigError(path + ":" + std::to_string(line_no) + ": non-numeric field");
    }
    if (fields.size() < 2) {
      throw ConfigError(path + ":" + std::to_string(line_no) +
                        ": need at least one feature and a label");
    }
    if (columns == 0) columns = fields.size();
    if (fields.size() != columns) {
      throw ConfigError(path + ":" + std::to_string(line_no) + ": expected " +
                        std::to_string(columns) + " columns");
    }
    const double label = fields.back();
    if (label != 0.0 && label != 1.0) {
      throw ConfigError(path + ":" + std::to_string(line_no) + ": label must be 0 or 1");
    }
    data.covariates.insert(data.covariates.end(), fields.begin(), fields.end() - 1);
    data.labels.push_back(static_cast<int>(label));
  }
  if (data.labels.empty()) throw ConfigError(path + ": no data rows");
  data.dim = columns - 1;
  return data;
}

LogisticRegressionModel::LogisticRegressionModel(LogisticParams params,
                                                 std::optional<Vector> theta_star)
    : PotentialModel("logistic", params.data.dim == 0 ? 1 : params.data.dim,
                     params.data.dim == 0 ? 1 : params.data.dim, 2.0,
                     params.sigma2 > 0.0 ? 2.0 / params.sigma2 : 1.0),
      params_(std::move(params)) {
  check_logistic(params_);
  if (theta_star) {
    if (theta_star->size() != d_theta()) {
      throw ConfigError("logistic theta_star has wrong length");
    }
    known_maximizer_ = std::move(theta_star);
  }
  finalize();
}

void LogisticRegressionModel::gradient(std::span<const double> theta,
                                       std::span<const double> x,
                                       std::span<double> g_theta,
                                       std::span<double> g_x) const {
  logistic_kernel(params_, theta, x, g_theta, g_x);
}

double LogisticRegressionModel::potential(std::span<const double> theta,
                                          std::span<const double> x) const {
  const double inv_s2 = 1.0 / params_.sigma2;
  double value = 0.0;
  for (std::size_t k = 0; k < x.size(); ++k) {
    const double d2 = (x[k] - theta[k]) * (x[k] - theta[k]);
    value += d2 * d2 * inv_s2 * inv_s2 + d2 * inv_s2;
  }
  const LogisticData& data = params_.data;
  for (std::size_t j = 0; j < data.size(); ++j) {
    const double t = dot(data.row(j), x);
    value += softplus(t) - static_cast<double>(data.labels[j]) * t;
  }
  return value;
}

// ---------------------------------------------------------------------------
// Higher-order toy

GradientValue higher_order_toy_gradient(int m, std::span<const double> theta,
                                        std::span<const double> x) {
  if (m < 1) throw ConfigError("toy model requires m >= 1");
  if (theta.empty() || x.empty()) throw ConfigError("toy model dimensions must be >= 1");
  check_finite(theta, "theta");
  check_finite(x, "x");
  GradientValue g = make_gradient(theta.size(), x.size());
  toy_kernel(m, theta, x, g.g_theta, g.g_x);
  return g;
}

HigherOrderToyModel::HigherOrderToyModel(int m, std::size_t d_theta, std::size_t d_x)
    : PotentialModel("toy", d_theta, d_x, 4.0 * m - 2.0, 2.0), m_(m) {
  if (m < 1) throw ConfigError("toy model requires m >= 1");
  known_maximizer_ = Vector(d_theta, 0.0);
  coordinate_ = {CoordinateForm::separable, 4.0, 0.0};
  finalize();
}

void HigherOrderToyModel::gradient(std::span<const double> theta,
                                   std::span<const double> x, std::span<double> g_theta,
                                   std::span<double> g_x) const {
  toy_kernel(m_, theta, x, g_theta, g_x);
}

double HigherOrderToyModel::potential(std::span<const double> theta,
                                      std::span<const double> x) const {
  const double r2x = squared_norm(x);
  const double r2t = squared_norm(theta);
  return ipow(r2x, 2 * m_) + (ipow(r2x, m_) + 1.0) * (ipow(r2t, m_) + 1.0) +
         ipow(r2t, 2 * m_) + r2x * r2x + (r2x + 1.0) * (r2t + 1.0) + r2t * r2t;
}

// ---------------------------------------------------------------------------
// Mixed-term toy

GradientValue mixed_term_toy_gradient(std::span<const double> theta,
                                      std::span<const double> x) {
  require_equal_dims(theta.size(), x.size(), "mixed model");
  if (theta.empty()) throw ConfigError("mixed model dimensions must be >= 1");
  check_finite(theta, "theta");
  check_finite(x, "x");
  GradientValue g = make_gradient(theta.size(), x.size());
  mixed_kernel(theta, x, g.g_theta, g.g_x);
  return g;
}

MixedTermToyModel::MixedTermToyModel(std::size_t d)
    : PotentialModel("mixed", d, d, 3.0, 1.0) {
  coordinate_ = {CoordinateForm::paired, 3.0, 0.5};
  finalize();
}

void MixedTermToyModel::gradient(std::span<const double> theta, std::span<const double> x,
                                 std::span<double> g_theta, std::span<double> g_x) const {
  mixed_kernel(theta, x, g_theta, g_x);
}

double MixedTermToyModel::potential(std::span<const double> theta,
                                    std::span<const double> x) const {
  const double r2x = squared_norm(x);
  const double r2t = squared_norm(theta);
  return dot(x, theta) + r2x * r2x + (r2x + 1.0) * (r2t + 1.0) + r2t * r2t;
}

// ---------------------------------------------------------------------------
// Quadratic diagnostic

GradientValue quadratic_diagnostic_gradient(std::span<const double> theta,
                                            std::span<const double> x) {
  require_equal_dims(theta.size(), x.size(), "quadratic model");
  if (theta.empty()) throw ConfigError("quadratic model dimensions must be >= 1");
  check_finite(theta, "theta");
  check_finite(x, "x");
  GradientValue g = make_gradient(theta.size(), x.size());
  quadratic_kernel(theta, x, g.g_theta, g.g_x);
  return g;
}

QuadraticModel::QuadraticModel(std::size_t d)
    : PotentialModel("quadratic", d, d, 1.0, kQuadraticMu) {
  known_maximizer_ = Vector(d, 0.0);
  // (mu, rho) = (1, 1/2) satisfies both paired inequalities but not 4 rho < mu;
  // no admissible pair exists for this model.
  coordinate_ = {CoordinateForm::paired, 1.0, 0.5};
  finalize();
}

void QuadraticModel::gradient(std::span<const double> theta, std::span<const double> x,
                              std::span<double> g_theta, std::span<double> g_x) const {
  quadratic_kernel(theta, x, g_theta, g_x);
}

double QuadraticModel::potential(std::span<const double> theta,
                                 std::span<const double> x) const {
  double value = 0.0;
  for (std::size_t k = 0; k < x.size(); ++k) {
    const double diff = x[k] - theta[k];
    value += 0.5 * diff * diff + 0.5 * theta[k] * theta[k];
  }
  return value;
}

}  // namespace tipla
