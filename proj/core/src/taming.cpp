#include "tipla/taming.hpp"

#include <algorithm>
#include <limits>
#include <numbers>
#include <string>

namespace tipla {

namespace {

// Euclidean norm that does not overflow for entries near the double range.
double robust_norm(std::span<const double> u) {
  double sum = 0.0;
  for (double value : u) sum += value * value;
  if (std::isfinite(sum) && sum > 1e-290) return std::sqrt(sum);
  double largest = 0.0;
  for (double value : u) largest = std::max(largest, std::abs(value));
  if (largest == 0.0 || !std::isfinite(largest)) return largest == 0.0 ? 0.0 : sum;
  sum = 0.0;
  for (double value : u) {
    const double r = value / largest;
    sum += r * r;
  }
  return largest * std::sqrt(sum);
}

void tame_uniform_span(const ScaledFactor& scale, double mu, std::span<const double> v,
                       std::span<double> h) {
  for (std::size_t k = 0; k < h.size(); ++k) h[k] -= mu * v[k];
  const double denominator = 1.0 + scale.apply(robust_norm(h));
  for (std::size_t k = 0; k < h.size(); ++k) h[k] = h[k] / denominator + mu * v[k];
}

void tame_coordinatewise_span(const ScaledFactor& scale, double mu,
                              std::span<const double> v, std::span<double> h) {
  for (std::size_t k = 0; k < h.size(); ++k) {
    const double shifted = h[k] - mu * v[k];
    h[k] = shifted / (1.0 + scale.apply(std::abs(shifted))) + mu * v[k];
  }
}

Vector stack(const GradientValue& g) {
  Vector h;
  h.reserve(g.g_theta.size() + g.g_x.size());
  h.insert(h.end(), g.g_theta.begin(), g.g_theta.end());
  h.insert(h.end(), g.g_x.begin(), g.g_x.end());
  return h;
}

GradientValue unstack(const Vector& h, std::size_t d_theta) {
  return {Vector(h.begin(), h.begin() + static_cast<std::ptrdiff_t>(d_theta)),
          Vector(h.begin() + static_cast<std::ptrdiff_t>(d_theta), h.end())};
}

void check_point(const GradientValue& g, std::span<const double> v) {
  if (g.g_theta.size() + g.g_x.size() != v.size()) {
    throw ConfigError("taming: gradient and point dimensions differ");
  }
}

}  // namespace

ScaledFactor ScaledFactor::power_of(double base, std::size_t n, double power) {
  ScaledFactor f;
  if (n <= 1 || power == 0.0) {
    f.mantissa_ = base;
    return f;
  }
  const double t = -power * std::log2(static_cast<double>(n));
  const double whole = std::nearbyint(t);
  f.exponent_ = static_cast<int>(whole);
  f.mantissa_ = base * std::exp2(t - whole);
  return f;
}

double ScaledFactor::log() const {
  if (mantissa_ == 0.0) return -std::numeric_limits<double>::infinity();
  return std::log(mantissa_) + static_cast<double>(exponent_) * std::numbers::ln2;
}

std::string_view to_string(TamingKind kind) {
  switch (kind) {
    case TamingKind::none:
      return "none";
    case TamingKind::uniform:
      return "uniform";
    case TamingKind::coordinatewise:
      return "coordinatewise";
  }
  return "none";
}

std::optional<TamingKind> parse_taming_kind(std::string_view text) {
  if (text == "none") return TamingKind::none;
  if (text == "uniform") return TamingKind::uniform;
  if (text == "coordinatewise") return TamingKind::coordinatewise;
  return std::nullopt;
}

double p_from_growth_order(double ell) { return 2.0 * ell + 1.0; }

void TamingSpec::validate() const {
  if (!(lambda > 0.0) || !std::isfinite(lambda)) {
    throw ConfigError("taming: lambda must be > 0");
  }
  if (!(mu > 0.0) || !std::isfinite(mu)) throw ConfigError("taming: mu must be > 0");
  if (kind == TamingKind::uniform) {
    if (n_particles < 1) throw ConfigError("taming: uniform kind needs N >= 1");
    if (!(p_exponent > 0.0)) throw ConfigError("taming: uniform kind needs p > 0");
  }
}

ScaledFactor TamingSpec::scale() const {
  const double root = std::sqrt(lambda);
  if (kind == TamingKind::uniform) {
    return ScaledFactor::power_of(root, n_particles, 0.5 * p_exponent);
  }
  return ScaledFactor::power_of(root, 1, 0.0);
}

TamingSpec make_taming_spec(TamingKind kind, const PotentialModel& model, double lambda,
                            std::size_t n_particles) {
  TamingSpec spec;
  spec.kind = kind;
  spec.mu = model.convexity_mu();
  spec.lambda = lambda;
  spec.n_particles = n_particles;
  spec.p_exponent = p_from_growth_order(model.growth_order());
  spec.validate();
  return spec;
}

Tamer::Tamer(const TamingSpec& spec) : spec_(spec), scale_(spec.scale()) {
  spec_.validate();
}

void Tamer::operator()(std::span<const double> v, std::span<double> h) const {
  switch (spec_.kind) {
    case TamingKind::none:
      return;
    case TamingKind::uniform:
      tame_uniform_span(scale_, spec_.mu, v, h);
      return;
    case TamingKind::coordinatewise:
      tame_coordinatewise_span(scale_, spec_.mu, v, h);
      return;
  }
}

GradientValue tame_uniform(const GradientValue& g, std::span<const double> v,
                           const TamingSpec& spec) {
  check_point(g, v);
  spec.validate();
  Vector h = stack(g);
  TamingSpec uniform = spec;
  uniform.kind = TamingKind::uniform;
  tame_uniform_span(uniform.scale(), spec.mu, v, h);
  return unstack(h, g.g_theta.size());
}

GradientValue tame_coordinatewise(const GradientValue& g, std::span<const double> v,
                                  const TamingSpec& spec) {
  check_point(g, v);
  spec.validate();
  Vector h = stack(g);
  TamingSpec coordinate = spec;
  coordinate.kind = TamingKind::coordinatewise;
  tame_coordinatewise_span(coordinate.scale(), spec.mu, v, h);
  return unstack(h, g.g_theta.size());
}

}  // namespace tipla
