#ifndef TIPLA_PROBES_HPP_
#define TIPLA_PROBES_HPP_

#include <cstddef>
#include <span>

#include "tipla/potentials.hpp"
#include "tipla/rng.hpp"

namespace tipla {

// Numerical checks of the structural assumptions a model claims. They validate
// the stored constants and never feed estimates back into a run. Convexity
// and dissipativity probes sample uniformly in balls whose radius is
// log-uniform on [radius / 100, radius]; the growth probe uses the full ball.

inline constexpr double kDefaultProbeRadius = 5.0;

struct ConvexityProbe {
  double estimate = 0.0;  // min over pairs of <v-v', h(v)-h(v')> / |v-v'|^2
  double claimed_mu = 0.0;
  std::size_t pairs = 0;
  bool violated = false;  // estimate < claimed_mu - tolerance
};

ConvexityProbe probe_strong_convexity(const PotentialModel& model, std::size_t n_pairs,
                                      double radius, RandomStream& rng,
                                      double tolerance = 1e-9);

struct CoordinateProbe {
  // Separable form, checked with the model's declared constant when its form
  // is separable and with the strong-convexity mu otherwise. Margins are
  // normalised by (1 + v_i^2) and minimised over samples and coordinates.
  double separable_mu = 0.0;
  double separable_worst_margin = 0.0;
  bool separable_holds = false;

  // Paired form, only when d_theta == d_x and the model declares (mu, rho).
  bool paired_checked = false;
  double paired_mu = 0.0;
  double paired_rho = 0.0;
  double paired_worst_margin = 0.0;
  bool paired_constraint_ok = false;  // 4 rho < mu
  bool paired_holds = false;

  // Whether coordinate-wise taming inherits dissipativity for this model.
  bool satisfied() const { return separable_holds || paired_holds; }
};

CoordinateProbe probe_coordinate_dissipativity(const PotentialModel& model,
                                               std::size_t n_samples, double radius,
                                               RandomStream& rng,
                                               double tolerance = 1e-9);

struct GrowthProbe {
  double constant = 0.0;  // max |h(v)| / (1 + |v|^{ell+1})
  double radius = 0.0;
  std::size_t samples = 0;
};

GrowthProbe estimate_growth_constant(const PotentialModel& model, std::size_t n_samples,
                                     double radius, RandomStream& rng);

struct DissipativityProbe {
  // min over samples of (<v, h(v)> - (mu/2)|v|^2 + b) / (1 + |v|^2)
  double worst_margin = 0.0;
  bool holds = false;
};

DissipativityProbe probe_dissipativity(const PotentialModel& model, std::size_t n_samples,
                                       double radius, RandomStream& rng,
                                       double tolerance = 1e-9);

struct FiniteDifferenceCheck {
  double max_relative_error = 0.0;  // better of the two step sizes
  double error_at_step = 0.0;
  double error_at_tenth_step = 0.0;
  bool cancellation_warning = false;  // the smaller step did worse
};

// Central differences of the scalar potential at h_step and h_step / 10.
// Relative error per coordinate is |fd - analytic| / max(1, |analytic|).
FiniteDifferenceCheck finite_difference_check(const PotentialModel& model,
                                              std::span<const double> point,
                                              double h_step = 1e-5);

}  // namespace tipla

#endif  // TIPLA_PROBES_HPP_
