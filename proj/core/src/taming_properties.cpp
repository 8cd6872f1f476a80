#include "tipla/taming_properties.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace tipla {

namespace {

double norm(std::span<const double> v) {
  double sum = 0.0;
  for (double value : v) sum += value * value;
  return std::sqrt(sum);
}

Vector tamed_copy(const Tamer& tamer, const TamingSample& sample) {
  Vector h = sample.h;
  tamer(sample.v, h);
  return h;
}

}  // namespace

std::vector<TamingSample> draw_taming_samples(const PotentialModel& model, std::size_t n,
                                              double radius, RandomStream& rng) {
  std::vector<TamingSample> samples(n);
  for (auto& sample : samples) {
    sample.v.resize(model.dim());
    sample.h.resize(model.dim());
    sample_ball(rng, radius, sample.v);
    model.gradient_joint(sample.v, sample.h);
  }
  return samples;
}

PropertyResult check_property_1(const TamingSpec& spec,
                                std::span<const TamingSample> samples) {
  const Tamer tamer(spec);
  const double inv_root = 1.0 / std::sqrt(spec.lambda);
  double offset = 0.0;
  if (spec.kind == TamingKind::uniform) {
    offset = std::exp(-0.5 * std::log(spec.lambda) +
                      0.5 * spec.p_exponent * std::log(static_cast<double>(spec.n_particles)));
  }
  PropertyResult result;
  result.value = std::numeric_limits<double>::infinity();
  result.samples = samples.size();
  for (const auto& sample : samples) {
    if (spec.kind == TamingKind::coordinatewise) {
      offset = static_cast<double>(sample.v.size()) * inv_root;
    }
    const double bound = spec.mu * norm(sample.v) + offset;
    const double margin = bound - norm(tamed_copy(tamer, sample));
    result.value = std::min(result.value, margin);
    if (!(margin >= -1e-12 * bound)) result.passed = false;
  }
  result.threshold = 0.0;
  return result;
}

PropertyResult check_property_2(const TamingSpec& spec, std::span<const TamingSample> samples,
                                double ell, double growth_constant) {
  const Tamer tamer(spec);
  double log_scale = 0.5 * std::log(spec.lambda);
  if (spec.kind == TamingKind::uniform) {
    log_scale -= 0.5 * spec.p_exponent * std::log(static_cast<double>(spec.n_particles));
  }
  PropertyResult result;
  result.threshold = std::exp2(2.0 * (ell + 1.5)) *
                     std::max(growth_constant * growth_constant, spec.mu * spec.mu);
  result.samples = samples.size();
  for (const auto& sample : samples) {
    const Vector tamed = tamed_copy(tamer, sample);
    double diff2 = 0.0;
    for (std::size_t k = 0; k < tamed.size(); ++k) {
      diff2 += (tamed[k] - sample.h[k]) * (tamed[k] - sample.h[k]);
    }
    if (diff2 == 0.0) continue;
    const double log_ratio = 0.5 * std::log(diff2) - log_scale -
                             std::log1p(std::pow(norm(sample.v), 2.0 * (ell + 1.0)));
    result.value = std::max(result.value, std::exp(log_ratio));
  }
  result.passed = result.value <= result.threshold;
  return result;
}

PropertyResult check_property_3(const TamingSpec& spec, std::span<const TamingSample> samples,
                                double b) {
  const Tamer tamer(spec);
  PropertyResult result;
  result.value = std::numeric_limits<double>::infinity();
  result.threshold = -1e-9;
  result.samples = samples.size();
  for (const auto& sample : samples) {
    const Vector tamed = tamed_copy(tamer, sample);
    double inner = 0.0;
    double r2 = 0.0;
    for (std::size_t k = 0; k < tamed.size(); ++k) {
      inner += sample.v[k] * tamed[k];
      r2 += sample.v[k] * sample.v[k];
    }
    const double margin = (inner - 0.5 * spec.mu * r2 + b) / (1.0 + r2);
    if (std::isnan(margin)) {
      result.value = margin;
      break;
    }
    result.value = std::min(result.value, margin);
  }
  result.passed = !(result.value < result.threshold) && !std::isnan(result.value);
  return result;
}

}  // namespace tipla
