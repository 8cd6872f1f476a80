#ifndef TIPLA_EXPERIMENT_HPP_
#define TIPLA_EXPERIMENT_HPP_

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "tipla/config.hpp"
#include "tipla/metrics.hpp"
#include "tipla/sampler.hpp"

namespace tipla {

enum ExitCode : int {
  kExitOk = 0,
  kExitValidation = 1,
  kExitIo = 2,
  kExitPropertyFailure = 3,
};

// Command-line overrides layered on top of a parsed config.
struct RunOverrides {
  std::optional<std::uint64_t> seed;
  std::optional<std::string> out_dir;
  std::optional<std::size_t> threads;
  bool strict = false;
};

ExperimentConfig apply_overrides(ExperimentConfig config, const RunOverrides& overrides);

struct ExperimentResult {
  int exit_code = kExitOk;
  std::vector<std::string> artifacts;
  std::vector<std::string> warnings;
  std::string error;
};

// Runs the configured experiment and writes its artifacts into
// config.output.dir. Never throws: failures map onto exit codes. Progress
// lines go to `log` when given.
ExperimentResult run_experiment(const ExperimentConfig& config, std::ostream* log = nullptr);

// Stationary statistics of one run, as written to summary.json.
struct RunSummary {
  std::string label;
  Vector final_theta;
  Moments window;  // theta over the records left after burn-in
  DivergenceSummary divergence;
  std::optional<double> w2_to_theta_star;
  double wall_time_seconds = 0.0;
};

RunSummary summarize(const Trajectory& trajectory, const PotentialModel& model,
                     double burn_in, std::string label);

struct PropertyCheck {
  std::string model;
  std::string check;
  std::string taming;  // empty for model-level checks
  double lambda = 0.0;
  std::size_t n_particles = 0;
  double value = 0.0;
  double threshold = 0.0;
  bool passed = true;
  bool skipped = false;
  std::string note;
};

struct PropertySuiteReport {
  std::vector<PropertyCheck> checks;

  bool passed() const;
  std::string to_json() const;
};

// Per model: gradient finite differences, strong convexity, dissipativity,
// coordinate-wise dissipativity and the growth constant; then Properties
// 1-3 of every taming kind over the lambda and N grids. Property 3 is
// skipped (not failed) when the assumption it inherits from does not hold.
PropertySuiteReport run_property_suite(const PropertySuiteConfig& config);

}  // namespace tipla

#endif  // TIPLA_EXPERIMENT_HPP_
