#include "tipla/probes.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace tipla {

namespace {

double dot(std::span<const double> a, std::span<const double> b) {
  double sum = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) sum += a[k] * b[k];
  return sum;
}

double norm(std::span<const double> v) { return std::sqrt(dot(v, v)); }

// Uniform in a ball whose radius is log-uniform on [radius / 100, radius], so
// assumption checks also see the neighbourhood of the origin.
double multiscale_radius(RandomStream& rng, double radius) {
  return radius * std::pow(10.0, -2.0 * rng.uniform());
}

Vector gradient_at_origin(const PotentialModel& model) {
  Vector zero(model.dim(), 0.0);
  Vector h0(model.dim(), 0.0);
  model.gradient_joint(zero, h0);
  return h0;
}

double fd_error(const PotentialModel& model, std::span<const double> point,
                std::span<const double> analytic, double step) {
  Vector probe(point.begin(), point.end());
  double worst = 0.0;
  for (std::size_t k = 0; k < probe.size(); ++k) {
    const double original = probe[k];
    probe[k] = original + step;
    const double up = model.potential_joint(probe);
    probe[k] = original - step;
    const double down = model.potential_joint(probe);
    probe[k] = original;
    const double fd = (up - down) / (2.0 * step);
    const double err = std::abs(fd - analytic[k]) / std::max(1.0, std::abs(analytic[k]));
    worst = std::max(worst, std::isfinite(err) ? err : std::numeric_limits<double>::infinity());
  }
  return worst;
}

}  // namespace

ConvexityProbe probe_strong_convexity(const PotentialModel& model, std::size_t n_pairs,
                                      double radius, RandomStream& rng, double tolerance) {
  if (n_pairs == 0) throw ConfigError("probe_strong_convexity needs n_pairs >= 1");
  if (!(radius > 0.0)) throw ConfigError("probe_strong_convexity needs radius > 0");
  const std::size_t d = model.dim();
  Vector v(d), w(d), hv(d), hw(d);
  ConvexityProbe probe;
  probe.claimed_mu = model.convexity_mu();
  probe.estimate = std::numeric_limits<double>::infinity();
  for (std::size_t n = 0; n < n_pairs; ++n) {
    double dist2 = 0.0;
    const double r = multiscale_radius(rng, radius);
    do {
      sample_ball(rng, r, v);
      sample_ball(rng, r, w);
      dist2 = 0.0;
      for (std::size_t k = 0; k < d; ++k) dist2 += (v[k] - w[k]) * (v[k] - w[k]);
    } while (dist2 == 0.0);
    model.gradient_joint(v, hv);
    model.gradient_joint(w, hw);
    double inner = 0.0;
    for (std::size_t k = 0; k < d; ++k) inner += (v[k] - w[k]) * (hv[k] - hw[k]);
    probe.estimate = std::min(probe.estimate, inner / dist2);
  }
  probe.pairs = n_pairs;
  probe.violated = probe.estimate < probe.claimed_mu - tolerance;
  return probe;
}

CoordinateProbe probe_coordinate_dissipativity(const PotentialModel& model,
                                               std::size_t n_samples, double radius,
                                               RandomStream& rng, double tolerance) {
  const std::size_t dt = model.d_theta();
  const std::size_t d = model.dim();
  const CoordinateCondition& declared = model.coordinate_condition();
  const Vector h0 = gradient_at_origin(model);

  CoordinateProbe probe;
  probe.separable_mu = declared.form == CoordinateForm::separable ? declared.mu
                                                                  : model.convexity_mu();
  probe.paired_checked = declared.form == CoordinateForm::paired && dt == model.d_x();
  if (probe.paired_checked) {
    probe.paired_mu = declared.mu;
    probe.paired_rho = declared.rho;
    probe.paired_constraint_ok = 4.0 * declared.rho < declared.mu;
  }

  double sep_worst = std::numeric_limits<double>::infinity();
  double pair_worst = std::numeric_limits<double>::infinity();
  const double mu_s = probe.separable_mu;
  const double mu_p = probe.paired_mu;
  const double rho = probe.paired_rho;

  Vector v(d), h(d);
  for (std::size_t n = 0; n < n_samples; ++n) {
    sample_ball(rng, multiscale_radius(rng, radius), v);
    model.gradient_joint(v, h);
    for (std::size_t i = 0; i < d; ++i) {
      const double margin =
          h[i] * v[i] - 0.5 * mu_s * v[i] * v[i] + h0[i] * h0[i] / (2.0 * mu_s);
      sep_worst = std::min(sep_worst, margin / (1.0 + v[i] * v[i]));
    }
    if (probe.paired_checked) {
      for (std::size_t i = 0; i < dt; ++i) {
        const double t = v[i];
        const double x = v[dt + i];
        const double scale = 1.0 + t * t + x * x;
        const double theta_margin = h[i] * t - 0.5 * mu_p * t * t + rho * x * x +
                                    h0[i] * h0[i] / (2.0 * mu_p);
        const double x_margin = h[dt + i] * x - 0.5 * mu_p * x * x + rho * t * t +
                                h0[dt + i] * h0[dt + i] / (2.0 * mu_p);
        pair_worst = std::min(pair_worst, std::min(theta_margin, x_margin) / scale);
      }
    }
  }
  probe.separable_worst_margin = sep_worst;
  probe.separable_holds = sep_worst >= -tolerance;
  if (probe.paired_checked) {
    probe.paired_worst_margin = pair_worst;
    probe.paired_holds = pair_worst >= -tolerance && probe.paired_constraint_ok;
  }
  return probe;
}

GrowthProbe estimate_growth_constant(const PotentialModel& model, std::size_t n_samples,
                                     double radius, RandomStream& rng) {
  const std::size_t d = model.dim();
  const double exponent = model.growth_order() + 1.0;
  Vector v(d), h(d);
  GrowthProbe probe;
  probe.radius = radius;
  probe.samples = n_samples;
  for (std::size_t n = 0; n < n_samples; ++n) {
    sample_ball(rng, radius, v);
    model.gradient_joint(v, h);
    probe.constant = std::max(probe.constant, norm(h) / (1.0 + std::pow(norm(v), exponent)));
  }
  return probe;
}

DissipativityProbe probe_dissipativity(const PotentialModel& model, std::size_t n_samples,
                                       double radius, RandomStream& rng, double tolerance) {
  const std::size_t d = model.dim();
  const double mu = model.convexity_mu();
  const double b = model.dissipativity_b();
  Vector v(d), h(d);
  DissipativityProbe probe;
  probe.worst_margin = std::numeric_limits<double>::infinity();
  for (std::size_t n = 0; n < n_samples; ++n) {
    sample_ball(rng, multiscale_radius(rng, radius), v);
    model.gradient_joint(v, h);
    const double r2 = dot(v, v);
    const double margin = dot(v, h) - 0.5 * mu * r2 + b;
    probe.worst_margin = std::min(probe.worst_margin, margin / (1.0 + r2));
  }
  probe.holds = probe.worst_margin >= -tolerance;
  return probe;
}

FiniteDifferenceCheck finite_difference_check(const PotentialModel& model,
                                              std::span<const double> point, double h_step) {
  if (!(h_step > 0.0)) throw ConfigError("finite difference step must be > 0");
  if (point.size() != model.dim()) {
    throw ConfigError("finite difference point has wrong dimension");
  }
  Vector analytic(model.dim());
  model.gradient_joint(point, analytic);
  FiniteDifferenceCheck check;
  check.error_at_step = fd_error(model, point, analytic, h_step);
  check.error_at_tenth_step = fd_error(model, point, analytic, h_step / 10.0);
  check.max_relative_error = std::min(check.error_at_step, check.error_at_tenth_step);
  check.cancellation_warning = check.error_at_tenth_step > check.error_at_step;
  return check;
}

}  // namespace tipla
