#ifndef TIPLA_CONFIG_HPP_
#define TIPLA_CONFIG_HPP_

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "tipla/potentials.hpp"
#include "tipla/probes.hpp"
#include "tipla/sampler.hpp"
#include "tipla/taming.hpp"

namespace tipla {

// Minimal TOML subset: [section] headers, key = value pairs, '#' comments,
// numbers, "strings", true/false and (possibly multi-line) arrays of those.
// Numbers keep their source text so 64-bit seeds survive exactly.
struct TomlValue {
  enum class Type { boolean, number, string, array };
  Type type = Type::number;
  bool boolean = false;
  std::string text;
  std::vector<TomlValue> items;
  int line = 0;
};

struct TomlTable {
  std::map<std::string, TomlValue> values;
  int line = 0;
};

struct TomlDocument {
  std::map<std::string, TomlTable> tables;  // "" holds top-level keys
};

// Throws ConfigError("<source>:<line>: ...") on syntax errors.
TomlDocument parse_toml(std::string_view text, const std::string& source = "<config>");

enum class ExperimentKind { single_run, n_sweep, algorithm_comparison, variance_study, property_suite };

std::string_view to_string(ExperimentKind kind);
std::optional<ExperimentKind> parse_experiment_kind(std::string_view text);

struct ModelConfig {
  std::string name = "quadratic";  // logistic | toy | mixed | quadratic
  std::size_t d_theta = 2;
  std::size_t d_x = 2;
  int m = 1;                  // toy order
  double sigma2 = 0.1;        // logistic prior scale
  std::size_t n_data = 900;   // logistic synthetic data size
  Vector theta_star;          // logistic synthetic truth
  std::uint64_t data_seed = 7;
  std::string data_path;      // logistic CSV instead of synthetic data
  std::optional<double> mu;   // overrides the model constant
  std::optional<double> ell;

  bool operator==(const ModelConfig&) const = default;
};

struct SweepConfig {
  std::vector<std::size_t> n_values;
  std::size_t repeats = 1;
  std::vector<Algorithm> algorithms;
  std::size_t threads = 1;

  bool operator==(const SweepConfig&) const = default;
};

struct OutputConfig {
  std::string dir = "out";
  double burn_in = 0.5;
  bool write_trajectories = true;

  bool operator==(const OutputConfig&) const = default;
};

struct PropertySuiteConfig {
  std::vector<std::string> models = {"toy", "mixed", "quadratic", "logistic"};
  std::vector<TamingKind> taming_kinds = {TamingKind::uniform, TamingKind::coordinatewise};
  std::size_t samples = 10000;
  Vector lambdas = {1e-2, 1e-4};
  std::vector<std::size_t> n_particles = {1, 10, 100};
  double radius = kDefaultProbeRadius;
  std::uint64_t seed = 1;
  // Multiplies the declared mu of the listed models before probing.
  double mu_scale = 1.0;
  std::vector<std::string> scaled_models;

  bool operator==(const PropertySuiteConfig&) const = default;
};

struct ExperimentConfig {
  ExperimentKind kind = ExperimentKind::single_run;
  ModelConfig model;
  RunConfig run;
  SweepConfig sweep;
  OutputConfig output;
  PropertySuiteConfig suite;

  bool operator==(const ExperimentConfig&) const = default;
};

// Throws ConfigError with a line number (syntax) or a field path
// (semantics); unknown sections and keys are rejected.
ExperimentConfig parse_config_text(std::string_view text, const std::string& source = "<config>");
// Throws IoError when the file cannot be read.
ExperimentConfig parse_config(const std::string& path);

// Semantic checks that need no model instance.
void validate_config(const ExperimentConfig& config);

// TOML text that parses back to an equal config.
std::string write_config(const ExperimentConfig& config);

ModelPtr build_model(const ModelConfig& config);
// Default-sized instance of a named model, as used by the property suite.
ModelPtr build_default_model(const std::string& name);

}  // namespace tipla

#endif  // TIPLA_CONFIG_HPP_
