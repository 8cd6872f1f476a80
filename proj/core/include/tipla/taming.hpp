#ifndef TIPLA_TAMING_HPP_
#define TIPLA_TAMING_HPP_

#include <cmath>
#include <cstddef>
#include <optional>
#include <span>
#include <string_view>

#include "tipla/potentials.hpp"

namespace tipla {

// A positive factor base * n^{-power}, stored as mantissa * 2^exponent so
// that values like 1e-4 / 1000^118 remain representable. For n == 1 the
// mantissa equals base exactly and the exponent is zero.
class ScaledFactor {
 public:
  ScaledFactor() = default;

  static ScaledFactor power_of(double base, std::size_t n, double power);
  static ScaledFactor zero() {
    ScaledFactor f;
    f.mantissa_ = 0.0;
    return f;
  }

  double apply(double v) const {
    const double scaled = v * mantissa_;
    return exponent_ == 0 ? scaled : std::ldexp(scaled, exponent_);
  }
  double mantissa() const { return mantissa_; }
  int exponent() const { return exponent_; }
  // Natural log of the factor; -inf for the zero factor.
  double log() const;
  // Plain double value; underflows to zero when out of range.
  double value() const { return std::ldexp(mantissa_, exponent_); }
  bool is_zero() const { return mantissa_ == 0.0; }

 private:
  double mantissa_ = 1.0;
  int exponent_ = 0;
};

enum class TamingKind { none, uniform, coordinatewise };

std::string_view to_string(TamingKind kind);
std::optional<TamingKind> parse_taming_kind(std::string_view text);

// p = 2 ell + 1.
double p_from_growth_order(double ell);

struct TamingSpec {
  TamingKind kind = TamingKind::none;
  double mu = 1.0;
  double lambda = 1e-4;
  std::size_t n_particles = 1;  // uniform kind only
  double p_exponent = 3.0;      // uniform kind only

  // Throws ConfigError when a field is out of range.
  void validate() const;

  // The coefficient in front of the shifted-gradient norm in the taming
  // denominator: lambda^{1/2} N^{-p/2} (uniform) or lambda^{1/2} (coordinatewise).
  ScaledFactor scale() const;

  bool operator==(const TamingSpec&) const = default;
};

// Spec for `kind` using the model's mu and p = 2 ell + 1.
TamingSpec make_taming_spec(TamingKind kind, const PotentialModel& model, double lambda,
                            std::size_t n_particles);

// Applies a TamingSpec to stacked (theta, x) vectors. Precomputes the
// log-space coefficient once; safe to share between threads.
class Tamer {
 public:
  explicit Tamer(const TamingSpec& spec);

  // h := tamed(h) given the point v. Non-finite entries of h propagate.
  void operator()(std::span<const double> v, std::span<double> h) const;

  const TamingSpec& spec() const { return spec_; }

 private:
  TamingSpec spec_;
  ScaledFactor scale_;
};

//   (h(v) - mu v) / (1 + lambda^{1/2} N^{-p/2} |h(v) - mu v|) + mu v
// with |.| the Euclidean norm of the stacked shifted gradient.
GradientValue tame_uniform(const GradientValue& g, std::span<const double> v,
                           const TamingSpec& spec);

// Per coordinate: (h_i - mu v_i) / (1 + lambda^{1/2} |h_i - mu v_i|) + mu v_i.
GradientValue tame_coordinatewise(const GradientValue& g, std::span<const double> v,
                                  const TamingSpec& spec);

}  // namespace tipla

#endif  // TIPLA_TAMING_HPP_
