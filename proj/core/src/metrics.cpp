#include "tipla/metrics.hpp"

#include <tbb/parallel_for.h>
#include <tbb/task_arena.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>

namespace tipla {

void SampleSet::push_back(std::span<const double> sample) {
  if (dim == 0 && values.empty()) dim = sample.size();
  if (sample.size() != dim) throw InputError("sample set: dimension mismatch");
  values.insert(values.end(), sample.begin(), sample.end());
}

SampleSet SampleSet::coordinate(std::size_t k) const {
  if (k >= dim) throw InputError("sample set: coordinate out of range");
  SampleSet out;
  out.dim = 1;
  out.label = label;
  out.values.reserve(size());
  for (std::size_t i = 0; i < size(); ++i) out.values.push_back(row(i)[k]);
  return out;
}

SampleSet SampleSet::scalar(Vector samples, std::string label) {
  SampleSet out;
  out.dim = 1;
  out.values = std::move(samples);
  out.label = std::move(label);
  return out;
}

void SampleSet::validate() const {
  if (dim == 0 || values.empty()) throw InputError("sample set '" + label + "' is empty");
  if (values.size() % dim != 0) throw InputError("sample set '" + label + "' is ragged");
  for (double v : values) {
    if (!std::isfinite(v)) throw InputError("sample set '" + label + "' has non-finite values");
  }
}

namespace {

Vector resample(const Vector& values, std::size_t count, RandomStream& rng) {
  Vector out(count);
  for (auto& v : out) v = values[rng.uniform_index(values.size())];
  return out;
}

}  // namespace

double w2_empirical_1d(const SampleSet& a, const SampleSet& b, std::uint64_t seed) {
  a.validate();
  b.validate();
  if (a.dim != 1 || b.dim != 1) throw InputError("w2_empirical_1d: sets must be one-dimensional");
  Vector x = a.values;
  Vector y = b.values;
  if (x.size() != y.size()) {
    RandomStream rng = RandomStream::derive(seed, StreamDomain::resample, 0);
    if (x.size() > y.size()) {
      x = resample(x, y.size(), rng);
    } else {
      y = resample(y, x.size(), rng);
    }
  }
  std::sort(x.begin(), x.end());
  std::sort(y.begin(), y.end());
  double sum = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) sum += (x[i] - y[i]) * (x[i] - y[i]);
  return std::sqrt(sum / static_cast<double>(x.size()));
}

CoordinateW2 w2_per_coordinate(const SampleSet& a, const SampleSet& b, std::uint64_t seed) {
  if (a.dim != b.dim) throw InputError("w2_per_coordinate: dimensions differ");
  CoordinateW2 out;
  for (std::size_t k = 0; k < a.dim; ++k) {
    out.per_coordinate.push_back(w2_empirical_1d(a.coordinate(k), b.coordinate(k), seed));
    out.max = std::max(out.max, out.per_coordinate.back());
  }
  return out;
}

double w2_to_point(const SampleSet& a, std::span<const double> point) {
  a.validate();
  if (point.size() != a.dim) throw InputError("w2_to_point: dimension mismatch");
  double sum = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const auto r = a.row(i);
    for (std::size_t k = 0; k < a.dim; ++k) sum += (r[k] - point[k]) * (r[k] - point[k]);
  }
  return std::sqrt(sum / static_cast<double>(a.size()));
}

Moments estimate_moments(const SampleSet& a) {
  a.validate();
  const std::size_t m = a.size();
  const double dm = static_cast<double>(m);
  Moments out;
  out.count = m;
  out.mean.assign(a.dim, 0.0);
  out.mean_se.assign(a.dim, 0.0);
  out.variance.assign(a.dim, 0.0);
  out.variance_se.assign(a.dim, 0.0);

  Vector norm2(m);
  for (std::size_t i = 0; i < m; ++i) {
    const auto r = a.row(i);
    double s = 0.0;
    for (std::size_t k = 0; k < a.dim; ++k) {
      out.mean[k] += r[k];
      s += r[k] * r[k];
    }
    norm2[i] = s;
  }
  for (auto& v : out.mean) v /= dm;

  if (m >= 2) {
    Vector m4(a.dim, 0.0);
    for (std::size_t i = 0; i < m; ++i) {
      const auto r = a.row(i);
      for (std::size_t k = 0; k < a.dim; ++k) {
        const double d = r[k] - out.mean[k];
        out.variance[k] += d * d;
        m4[k] += d * d * d * d;
      }
    }
    for (std::size_t k = 0; k < a.dim; ++k) {
      const double biased = out.variance[k] / dm;
      out.variance[k] /= dm - 1.0;
      m4[k] /= dm;
      out.mean_se[k] = std::sqrt(out.variance[k] / dm);
      const double var_of_var = (m4[k] - biased * biased * (dm - 3.0) / (dm - 1.0)) / dm;
      out.variance_se[k] = std::sqrt(std::max(0.0, var_of_var));
    }
  }

  auto mean_and_se = [&](auto&& f, double& mean, double& se) {
    double s = 0.0;
    for (double v : norm2) s += f(v);
    mean = s / dm;
    if (m < 2) return;
    double ss = 0.0;
    for (double v : norm2) ss += (f(v) - mean) * (f(v) - mean);
    se = std::sqrt(ss / (dm - 1.0) / dm);
  };
  mean_and_se([](double v) { return v; }, out.norm2_mean, out.norm2_se);
  mean_and_se([](double v) { return v * v; }, out.norm4_mean, out.norm4_se);
  return out;
}

SampleSet theta_samples(const Trajectory& trajectory, double burn_in) {
  if (!(burn_in >= 0.0 && burn_in < 1.0)) throw ConfigError("burn_in: must lie in [0, 1)");
  SampleSet out;
  out.label = "theta";
  const auto& records = trajectory.records;
  if (records.empty()) return out;
  out.dim = records.front().theta.size();
  const auto skip =
      static_cast<std::size_t>(std::floor(burn_in * static_cast<double>(records.size())));
  for (std::size_t i = skip; i < records.size(); ++i) {
    const auto& theta = records[i].theta;
    if (std::all_of(theta.begin(), theta.end(), [](double v) { return std::isfinite(v); })) {
      out.values.insert(out.values.end(), theta.begin(), theta.end());
    }
  }
  return out;
}

DivergenceSummary divergence_summary(const Trajectory& trajectory) {
  DivergenceSummary out;
  for (const auto& r : trajectory.records) {
    const double norm = std::isfinite(r.rescaled_norm_sq)
                            ? std::sqrt(r.rescaled_norm_sq)
                            : std::numeric_limits<double>::infinity();
    out.max_norm = std::max(out.max_norm, norm);
    if (r.diverged && !out.diverged) {
      out.diverged = true;
      out.first_step = r.step;
    }
  }
  // The sampler knows the exact step even when records are thinned.
  if (trajectory.divergence_step) {
    out.diverged = true;
    out.first_step = trajectory.divergence_step;
  }
  return out;
}

std::optional<double> ols_slope(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size() || x.size() < 2) return std::nullopt;
  const std::set<double> distinct(x.begin(), x.end());
  if (distinct.size() < 2) return std::nullopt;
  const double n = static_cast<double>(x.size());
  double mx = 0.0;
  double my = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxy = 0.0;
  double sxx = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
  }
  return sxy / sxx;
}

std::vector<std::size_t> ScalingReport::n_values() const {
  std::vector<std::size_t> out;
  for (const auto& e : entries) out.push_back(e.n_particles);
  return out;
}

ScalingReport variance_vs_n_study(const PotentialModel& model, const VarianceStudy& study) {
  if (study.n_values.empty()) throw ConfigError("sweep.n_values: must not be empty");
  for (std::size_t j = 0; j < study.n_values.size(); ++j) {
    if (study.n_values[j] < 1 || (j > 0 && study.n_values[j] <= study.n_values[j - 1])) {
      throw ConfigError("sweep.n_values: must be positive and strictly increasing");
    }
  }
  if (study.repeats < 1) throw ConfigError("sweep.repeats: must be >= 1");
  if (study.threads < 1) throw ConfigError("sweep.threads: must be >= 1");

  const std::size_t cells = study.n_values.size() * study.repeats;
  std::vector<Vector> finals(cells);
  std::vector<char> diverged(cells, 0);

  auto run_cell = [&](std::size_t c) {
    RunConfig config = study.base;
    config.n_particles = study.n_values[c / study.repeats];
    config.seed = derive_seed(study.base.seed, static_cast<std::uint64_t>(StreamDomain::cell), c);
    config.threads = 1;
    config.record_every = std::max<std::size_t>(config.n_steps, 1);
    const Trajectory t = run(config, model);
    finals[c] = t.final_state.theta;
    diverged[c] = t.final_state.diverged ? 1 : 0;
  };
  if (study.threads > 1) {
    tbb::task_arena arena(static_cast<int>(study.threads));
    arena.execute([&] { tbb::parallel_for(std::size_t{0}, cells, run_cell); });
  } else {
    for (std::size_t c = 0; c < cells; ++c) run_cell(c);
  }

  ScalingReport report;
  Vector log_n;
  Vector log_var;
  for (std::size_t j = 0; j < study.n_values.size(); ++j) {
    ScalingEntry entry;
    entry.n_particles = study.n_values[j];
    entry.repeats = study.repeats;
    SampleSet set;
    set.label = "final_theta";
    for (std::size_t r = 0; r < study.repeats; ++r) {
      const std::size_t c = j * study.repeats + r;
      entry.final_thetas.push_back(finals[c]);
      if (diverged[c]) {
        ++entry.diverged_repeats;
      } else {
        set.push_back(finals[c]);
      }
    }
    if (entry.diverged_repeats > 0) {
      entry.valid = false;
      entry.note = std::to_string(entry.diverged_repeats) + " diverged repeat(s)";
    } else if (study.repeats < 2) {
      entry.valid = false;
      entry.note = "variance needs at least two repeats";
    } else {
      const Moments m = estimate_moments(set);
      entry.variance = m.variance;
      double s = 0.0;
      for (double v : m.variance) s += v;
      entry.mean_variance = s / static_cast<double>(m.variance.size());
      if (!(entry.mean_variance > 0.0)) {
        entry.valid = false;
        entry.note = "zero variance";
      } else {
        log_n.push_back(std::log(static_cast<double>(entry.n_particles)));
        log_var.push_back(std::log(entry.mean_variance));
      }
    }
    report.entries.push_back(std::move(entry));
  }
  report.fitted_slope = ols_slope(log_n, log_var);
  return report;
}

}  // namespace tipla
