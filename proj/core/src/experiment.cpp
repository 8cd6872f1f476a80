#include "tipla/experiment.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <ostream>

#include "tipla/io.hpp"
#include "tipla/probes.hpp"
#include "tipla/taming_properties.hpp"

namespace tipla {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr std::size_t kFiniteDifferencePoints = 100;
constexpr double kFiniteDifferenceTolerance = 1e-4;

json number_or_null(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

json vector_json(const Vector& v) {
  json out = json::array();
  for (double x : v) out.push_back(number_or_null(x));
  return out;
}

json config_json(const ExperimentConfig& c) {
  json model = {{"name", c.model.name},
                {"d_theta", c.model.d_theta},
                {"d_x", c.model.d_x}};
  if (c.model.name == "toy") model["m"] = c.model.m;
  if (c.model.name == "logistic") {
    model["sigma2"] = c.model.sigma2;
    model["n_data"] = c.model.n_data;
    model["data_seed"] = c.model.data_seed;
    model["theta_star"] = vector_json(c.model.theta_star);
    if (!c.model.data_path.empty()) model["data_path"] = c.model.data_path;
  }
  if (c.model.mu) model["mu"] = *c.model.mu;
  if (c.model.ell) model["ell"] = *c.model.ell;
  const auto& r = c.run;
  json run = {{"algorithm", std::string(to_string(r.algorithm))},
              {"taming", std::string(to_string(r.taming_kind()))},
              {"lambda", r.lambda},
              {"n_particles", r.n_particles},
              {"n_steps", r.n_steps},
              {"seed", r.seed},
              {"record_every", r.record_every},
              {"threads", r.threads},
              {"stop_on_divergence", r.stop_on_divergence},
              {"strict", r.strict}};
  return {{"experiment", std::string(to_string(c.kind))},
          {"model", model},
          {"run", run},
          {"config_text", write_config(c)}};
}

json summary_json(const RunSummary& s, const Trajectory& t) {
  json window = {{"samples", s.window.count},
                 {"mean", vector_json(s.window.mean)},
                 {"variance", vector_json(s.window.variance)},
                 {"mean_se", vector_json(s.window.mean_se)}};
  json divergence = {{"diverged", s.divergence.diverged},
                     {"first_step", s.divergence.first_step ? json(*s.divergence.first_step)
                                                            : json(nullptr)},
                     {"max_norm", number_or_null(s.divergence.max_norm)}};
  return {{"label", s.label},
          {"algorithm", std::string(to_string(t.config.algorithm))},
          {"taming", std::string(to_string(t.taming.kind))},
          {"n_particles", t.config.n_particles},
          {"seed", t.config.seed},
          {"lambda", t.config.lambda},
          {"n_steps", t.config.n_steps},
          {"final_theta", vector_json(s.final_theta)},
          {"last_window", window},
          {"divergence", divergence},
          {"w2_to_theta_star",
           s.w2_to_theta_star ? number_or_null(*s.w2_to_theta_star) : json(nullptr)},
          {"wall_time_seconds", s.wall_time_seconds},
          {"warnings", t.warnings}};
}

void say(std::ostream* log, const std::string& line) {
  if (log) *log << line << '\n';
}

struct Cell {
  std::string label;
  RunConfig run;
};

// One trajectory per cell, each written to trajectory_<label>.csv.
json run_cells(const std::vector<Cell>& cells, const PotentialModel& model,
               const ExperimentConfig& config, ExperimentResult& result, std::ostream* log,
               std::vector<std::pair<RunSummary, Trajectory>>* keep = nullptr) {
  const fs::path dir = config.output.dir;
  json runs = json::array();
  for (const auto& cell : cells) {
    say(log, "running " + cell.label);
    Trajectory t = run(cell.run, model);
    for (const auto& w : t.warnings) result.warnings.push_back(cell.label + ": " + w);
    if (config.output.write_trajectories) {
      const fs::path path = dir / ("trajectory_" + cell.label + ".csv");
      write_trajectory_csv(path, t);
      result.artifacts.push_back(path.string());
    }
    RunSummary s = summarize(t, model, config.output.burn_in, cell.label);
    runs.push_back(summary_json(s, t));
    if (keep) keep->emplace_back(std::move(s), std::move(t));
  }
  return runs;
}

std::uint64_t cell_seed(std::uint64_t master, std::size_t index) {
  return derive_seed(master, static_cast<std::uint64_t>(StreamDomain::cell), index);
}

void execute(const ExperimentConfig& config, ExperimentResult& result, std::ostream* log) {
  const fs::path dir = config.output.dir;
  ensure_directory(dir);
  const ModelPtr model = build_model(config.model);
  validate_run_config(config.run, *model);
  if (config.run.strict) {
    const auto check = check_stepsize(config.run, *model, run_taming_spec(config.run, *model));
    if (!check.admissible) {
      throw ConfigError("run.lambda: stepsize violates " + check.rule);
    }
  }

  json summary = {{"config", config_json(config)}};
  switch (config.kind) {
    case ExperimentKind::single_run: {
      say(log, "running single run");
      const Trajectory t = run(config.run, *model);
      result.warnings.insert(result.warnings.end(), t.warnings.begin(), t.warnings.end());
      if (config.output.write_trajectories) {
        write_trajectory_csv(dir / "trajectory.csv", t);
        result.artifacts.push_back((dir / "trajectory.csv").string());
      }
      summary["run"] = summary_json(summarize(t, *model, config.output.burn_in, "run"), t);
      break;
    }
    case ExperimentKind::n_sweep: {
      std::vector<Cell> cells;
      for (std::size_t j = 0; j < config.sweep.n_values.size(); ++j) {
        Cell cell{"N" + std::to_string(config.sweep.n_values[j]), config.run};
        cell.run.n_particles = config.sweep.n_values[j];
        cell.run.seed = cell_seed(config.run.seed, j);
        cells.push_back(std::move(cell));
      }
      std::vector<std::pair<RunSummary, Trajectory>> kept;
      summary["runs"] = run_cells(cells, *model, config, result, log, &kept);
      std::string csv = "n_particles,diverged,mean_window_variance,w2_to_theta_star\n";
      for (std::size_t j = 0; j < kept.size(); ++j) {
        const auto& s = kept[j].first;
        double mean_var = 0.0;
        for (double v : s.window.variance) mean_var += v;
        if (!s.window.variance.empty()) mean_var /= static_cast<double>(s.window.variance.size());
        csv += std::to_string(config.sweep.n_values[j]) + "," +
               (s.divergence.diverged ? "1" : "0") + "," + format_double(mean_var) + "," +
               (s.w2_to_theta_star ? format_double(*s.w2_to_theta_star) : "nan") + "\n";
      }
      write_text_file(dir / "scaling.csv", csv);
      result.artifacts.push_back((dir / "scaling.csv").string());
      break;
    }
    case ExperimentKind::algorithm_comparison: {
      std::vector<Cell> cells;
      for (std::size_t j = 0; j < config.sweep.algorithms.size(); ++j) {
        Cell cell{std::string(to_string(config.sweep.algorithms[j])), config.run};
        cell.run.algorithm = config.sweep.algorithms[j];
        cell.run.taming.reset();
        cell.run.seed = cell_seed(config.run.seed, j);
        cells.push_back(std::move(cell));
      }
      summary["runs"] = run_cells(cells, *model, config, result, log);
      break;
    }
    case ExperimentKind::variance_study: {
      say(log, "running variance study");
      VarianceStudy study;
      study.base = config.run;
      study.n_values = config.sweep.n_values;
      study.repeats = config.sweep.repeats;
      study.threads = config.sweep.threads;
      const ScalingReport report = variance_vs_n_study(*model, study);
      write_scaling_csv(dir / "scaling.csv", report);
      result.artifacts.push_back((dir / "scaling.csv").string());
      json entries = json::array();
      for (const auto& e : report.entries) {
        entries.push_back({{"n_particles", e.n_particles},
                           {"repeats", e.repeats},
                           {"diverged_repeats", e.diverged_repeats},
                           {"valid", e.valid},
                           {"variance", vector_json(e.variance)},
                           {"mean_variance", e.valid ? json(e.mean_variance) : json(nullptr)},
                           {"note", e.note}});
      }
      summary["scaling"] = {
          {"estimator", report.estimator},
          {"fitted_slope", report.fitted_slope ? json(*report.fitted_slope) : json(nullptr)},
          {"entries", entries}};
      break;
    }
    case ExperimentKind::property_suite:
      break;
  }
  write_text_file(dir / "summary.json", summary.dump(2) + "\n");
  result.artifacts.push_back((dir / "summary.json").string());
}

PropertyCheck model_check(const std::string& model, const std::string& check, double value,
                          double threshold, bool passed, std::string note = {}) {
  PropertyCheck c;
  c.model = model;
  c.check = check;
  c.value = value;
  c.threshold = threshold;
  c.passed = passed;
  c.note = std::move(note);
  return c;
}

}  // namespace

ExperimentConfig apply_overrides(ExperimentConfig config, const RunOverrides& overrides) {
  if (overrides.seed) config.run.seed = *overrides.seed;
  if (overrides.out_dir) config.output.dir = *overrides.out_dir;
  if (overrides.threads) {
    config.run.threads = *overrides.threads;
    config.sweep.threads = *overrides.threads;
  }
  if (overrides.strict) config.run.strict = true;
  validate_config(config);
  return config;
}

RunSummary summarize(const Trajectory& trajectory, const PotentialModel& model, double burn_in,
                     std::string label) {
  RunSummary s;
  s.label = std::move(label);
  s.final_theta = trajectory.final_state.theta;
  s.divergence = divergence_summary(trajectory);
  s.wall_time_seconds = trajectory.wall_time_seconds;
  const SampleSet window = theta_samples(trajectory, burn_in);
  if (window.size() > 0) {
    s.window = estimate_moments(window);
    if (model.known_maximizer()) s.w2_to_theta_star = w2_to_point(window, *model.known_maximizer());
  }
  return s;
}

ExperimentResult run_experiment(const ExperimentConfig& config, std::ostream* log) {
  ExperimentResult result;
  try {
    if (config.kind == ExperimentKind::property_suite) {
      ensure_directory(config.output.dir);
      say(log, "running property suite");
      const PropertySuiteReport report = run_property_suite(config.suite);
      const fs::path path = fs::path(config.output.dir) / "property_report.json";
      write_text_file(path, report.to_json());
      result.artifacts.push_back(path.string());
      if (!report.passed()) {
        result.exit_code = kExitPropertyFailure;
        for (const auto& c : report.checks) {
          if (!c.passed && !c.skipped) {
            result.error += c.model + "/" + c.check +
                            (c.taming.empty() ? "" : "/" + c.taming) + " failed; ";
          }
        }
      }
      return result;
    }
    execute(config, result, log);
  } catch (const IoError& e) {
    result.exit_code = kExitIo;
    result.error = e.what();
  } catch (const ConfigError& e) {
    result.exit_code = kExitValidation;
    result.error = e.what();
  } catch (const InputError& e) {
    result.exit_code = kExitValidation;
    result.error = e.what();
  }
  return result;
}

bool PropertySuiteReport::passed() const {
  return std::all_of(checks.begin(), checks.end(),
                     [](const PropertyCheck& c) { return c.passed || c.skipped; });
}

std::string PropertySuiteReport::to_json() const {
  json list = json::array();
  for (const auto& c : checks) {
    json entry = {{"model", c.model},
                  {"check", c.check},
                  {"value", number_or_null(c.value)},
                  {"threshold", number_or_null(c.threshold)},
                  {"passed", c.passed},
                  {"skipped", c.skipped}};
    if (!c.taming.empty()) {
      entry["taming"] = c.taming;
      entry["lambda"] = c.lambda;
      entry["n_particles"] = c.n_particles;
    }
    if (!c.note.empty()) entry["note"] = c.note;
    list.push_back(std::move(entry));
  }
  return json{{"passed", passed()}, {"checks", list}}.dump(2) + "\n";
}

PropertySuiteReport run_property_suite(const PropertySuiteConfig& config) {
  PropertySuiteReport report;
  const std::size_t budget = config.samples;
  for (std::size_t mi = 0; mi < config.models.size(); ++mi) {
    const std::string& name = config.models[mi];
    const ModelPtr model = build_default_model(name);
    if (std::find(config.scaled_models.begin(), config.scaled_models.end(), name) !=
        config.scaled_models.end()) {
      model->set_convexity_mu(model->convexity_mu() * config.mu_scale);
    }
    RandomStream rng = RandomStream::derive(config.seed, StreamDomain::probe, mi);

    double fd_worst = 0.0;
    Vector point(model->dim());
    for (std::size_t i = 0; i < kFiniteDifferencePoints; ++i) {
      sample_ball(rng, config.radius, point);
      fd_worst = std::max(fd_worst, finite_difference_check(*model, point).max_relative_error);
    }
    report.checks.push_back(model_check(name, "gradient_finite_difference", fd_worst,
                                        kFiniteDifferenceTolerance,
                                        fd_worst < kFiniteDifferenceTolerance));

    const auto convexity = probe_strong_convexity(*model, budget, config.radius, rng);
    report.checks.push_back(model_check(name, "strong_convexity", convexity.estimate,
                                        convexity.claimed_mu, !convexity.violated));

    const auto dissipativity = probe_dissipativity(*model, budget, config.radius, rng);
    report.checks.push_back(model_check(name, "dissipativity", dissipativity.worst_margin, 0.0,
                                        dissipativity.holds));

    const auto coordinate = probe_coordinate_dissipativity(*model, budget, config.radius, rng);
    {
      auto c = model_check(name, "coordinate_dissipativity",
                           coordinate.paired_checked ? coordinate.paired_worst_margin
                                                     : coordinate.separable_worst_margin,
                           0.0, true);
      // Informational: not every model is meant to admit coordinate-wise taming.
      c.note = coordinate.satisfied() ? "holds" : "does not hold; coordinate-wise Property 3 skipped";
      if (coordinate.paired_checked && !coordinate.paired_constraint_ok) {
        c.note += " (paired constants violate 4 rho < mu)";
      }
      report.checks.push_back(std::move(c));
    }

    const auto growth = estimate_growth_constant(*model, budget, config.radius, rng);
    report.checks.push_back(
        model_check(name, "growth_constant", growth.constant, 0.0, true, "informational"));

    const auto samples = draw_taming_samples(*model, budget, config.radius, rng);
    const bool uniform_ok = dissipativity.holds && !convexity.violated;
    const bool coordinate_ok = coordinate.satisfied();
    for (TamingKind kind : config.taming_kinds) {
      if (kind == TamingKind::none) continue;
      const std::vector<std::size_t> ns =
          kind == TamingKind::uniform ? config.n_particles : std::vector<std::size_t>{1};
      for (double lambda : config.lambdas) {
        for (std::size_t n : ns) {
          const TamingSpec spec = make_taming_spec(kind, *model, lambda, n);
          auto add = [&](const std::string& check, const PropertyResult& r, bool skipped,
                         std::string note) {
            PropertyCheck c = model_check(name, check, r.value, r.threshold, r.passed, note);
            c.taming = std::string(to_string(kind));
            c.lambda = lambda;
            c.n_particles = n;
            c.skipped = skipped;
            if (skipped) c.passed = false;
            report.checks.push_back(std::move(c));
          };
          add("property_1", check_property_1(spec, samples), false, {});
          add("property_2", check_property_2(spec, samples, model->growth_order(), growth.constant),
              false, {});
          const bool eligible = kind == TamingKind::uniform ? uniform_ok : coordinate_ok;
          if (eligible) {
            add("property_3", check_property_3(spec, samples, model->dissipativity_b()), false, {});
          } else {
            add("property_3", PropertyResult{}, true, "assumption probe failed");
          }
        }
      }
    }
  }
  return report;
}

}  // namespace tipla
