#ifndef TIPLA_TAMING_PROPERTIES_HPP_
#define TIPLA_TAMING_PROPERTIES_HPP_

#include <cstddef>
#include <span>
#include <vector>

#include "tipla/potentials.hpp"
#include "tipla/rng.hpp"
#include "tipla/taming.hpp"

namespace tipla {

// A stacked point v = (theta, x) with its raw gradient h(v).
struct TamingSample {
  Vector v;
  Vector h;
};

std::vector<TamingSample> draw_taming_samples(const PotentialModel& model, std::size_t n,
                                              double radius, RandomStream& rng);

struct PropertyResult {
  double value = 0.0;      // worst margin or worst ratio, see each check
  double threshold = 0.0;  // what `value` is compared against
  bool passed = true;
  std::size_t samples = 0;
};

// Linear growth of the tamed gradient.
//   uniform:        |h_u(v)| <= mu |v| + lambda^{-1/2} N^{p/2}
//   coordinatewise: |h_c(v)| <= mu |v| + dim * lambda^{-1/2}
// value = min(bound - |tamed|); passes when every sample has
// bound - |tamed| >= -1e-12 * bound.
PropertyResult check_property_1(const TamingSpec& spec, std::span<const TamingSample> samples);

// Closeness to the raw gradient:
//   |tamed - h| / (lambda^{1/2} scale (1 + |v|^{2(ell+1)}))  <=  C1
// with scale = N^{-p/2} (uniform) or 1 (coordinatewise) and
// C1 = 2^{2(ell + 3/2)} max(K^2, mu^2). value = max ratio, threshold = C1.
PropertyResult check_property_2(const TamingSpec& spec, std::span<const TamingSample> samples,
                                double ell, double growth_constant);

// Inherited dissipativity: <v, tamed(v)> >= (mu/2)|v|^2 - b.
// value = min over samples of (<v, tamed> - (mu/2)|v|^2 + b) / (1 + |v|^2),
// passes when value >= -1e-9.
PropertyResult check_property_3(const TamingSpec& spec, std::span<const TamingSample> samples,
                                double b);

}  // namespace tipla

#endif  // TIPLA_TAMING_PROPERTIES_HPP_
