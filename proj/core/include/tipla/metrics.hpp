#ifndef TIPLA_METRICS_HPP_
#define TIPLA_METRICS_HPP_

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "tipla/potentials.hpp"
#include "tipla/sampler.hpp"

namespace tipla {

// M samples of equal dimension, stored row-major.
struct SampleSet {
  std::size_t dim = 0;
  Vector values;
  std::string label;

  std::size_t size() const { return dim == 0 ? 0 : values.size() / dim; }
  std::span<const double> row(std::size_t i) const { return {values.data() + i * dim, dim}; }
  void push_back(std::span<const double> sample);
  // One-dimensional set holding coordinate k of every sample.
  SampleSet coordinate(std::size_t k) const;

  static SampleSet scalar(Vector samples, std::string label = {});

  // Throws InputError when empty, ragged or non-finite.
  void validate() const;
};

// Sorted-coupling W2 between two one-dimensional empirical measures. When
// the counts differ the larger set is resampled with replacement down to
// the smaller count using `seed`.
double w2_empirical_1d(const SampleSet& a, const SampleSet& b, std::uint64_t seed = 0);

struct CoordinateW2 {
  Vector per_coordinate;
  double max = 0.0;
};
CoordinateW2 w2_per_coordinate(const SampleSet& a, const SampleSet& b, std::uint64_t seed = 0);

// Exact W2 against a Dirac: root mean squared distance to `point`.
double w2_to_point(const SampleSet& a, std::span<const double> point);

struct Moments {
  std::size_t count = 0;
  Vector mean;
  Vector mean_se;
  Vector variance;     // unbiased; zero when count < 2
  Vector variance_se;  // from the fourth central moment
  double norm2_mean = 0.0;
  double norm2_se = 0.0;
  double norm4_mean = 0.0;
  double norm4_se = 0.0;
};
Moments estimate_moments(const SampleSet& a);

// Recorded theta snapshots after discarding the first `burn_in` fraction of
// the records. Non-finite snapshots are skipped.
SampleSet theta_samples(const Trajectory& trajectory, double burn_in = 0.5);

struct DivergenceSummary {
  bool diverged = false;
  std::optional<std::size_t> first_step;
  double max_norm = 0.0;  // max sqrt(rescaled_norm_sq) over records, inf if non-finite
};
DivergenceSummary divergence_summary(const Trajectory& trajectory);

// Least-squares slope of y on x; absent with fewer than two distinct x.
std::optional<double> ols_slope(std::span<const double> x, std::span<const double> y);

struct VarianceStudy {
  RunConfig base;  // n_particles and seed are overridden per cell
  std::vector<std::size_t> n_values;
  std::size_t repeats = 10;
  std::size_t threads = 1;  // concurrent cells
};

struct ScalingEntry {
  std::size_t n_particles = 0;
  Vector variance;  // per-coordinate variance of the final theta over repeats
  double mean_variance = 0.0;
  std::size_t repeats = 0;
  std::size_t diverged_repeats = 0;
  bool valid = true;
  std::string note;
  std::vector<Vector> final_thetas;
};

struct ScalingReport {
  std::vector<ScalingEntry> entries;
  std::optional<double> fitted_slope;  // ln(mean variance) on ln N, valid entries only
  std::string estimator = "final_iterate";

  std::vector<std::size_t> n_values() const;
};

// Cell (n index j, repeat r) runs with seed derive_seed(base.seed, cell, j * repeats + r).
ScalingReport variance_vs_n_study(const PotentialModel& model, const VarianceStudy& study);

}  // namespace tipla

#endif  // TIPLA_METRICS_HPP_
