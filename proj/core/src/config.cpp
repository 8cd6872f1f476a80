#include "tipla/config.hpp"

#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

namespace tipla {

namespace {

// ---------------------------------------------------------------------------
// TOML subset parser

class Parser {
 public:
  Parser(std::string_view text, const std::string& source) : s_(text), source_(source) {}

  TomlDocument parse() {
    TomlDocument doc;
    doc.tables[""].line = 1;
    std::string current;
    while (true) {
      skip_inline();
      if (at_end()) break;
      const char c = peek();
      if (c == '#') {
        skip_comment();
      } else if (c == '\n' || c == '\r') {
        newline();
      } else if (c == '[') {
        ++pos_;
        skip_inline();
        std::string name = bare_key("table name");
        skip_inline();
        expect(']');
        if (doc.tables.count(name)) fail("duplicate section [" + name + "]");
        doc.tables[name].line = line_;
        current = name;
        end_of_line();
      } else {
        const int key_line = line_;
        std::string key = bare_key("key");
        skip_inline();
        expect('=');
        skip_inline();
        TomlValue value = parse_value();
        auto& table = doc.tables[current];
        if (table.values.count(key)) {
          line_ = key_line;
          fail("duplicate key '" + key + "'");
        }
        value.line = key_line;
        table.values.emplace(std::move(key), std::move(value));
        end_of_line();
      }
    }
    return doc;
  }

 private:
  [[noreturn]] void fail(const std::string& message) const {
    throw ConfigError(source_ + ":" + std::to_string(line_) + ": " + message);
  }

  bool at_end() const { return pos_ >= s_.size(); }
  char peek() const { return s_[pos_]; }

  void skip_inline() {
    while (!at_end() && (peek() == ' ' || peek() == '\t')) ++pos_;
  }
  void skip_comment() {
    while (!at_end() && peek() != '\n') ++pos_;
  }
  void newline() {
    if (peek() == '\r') ++pos_;
    if (!at_end() && peek() == '\n') ++pos_;
    ++line_;
  }
  // Whitespace, newlines and comments, as allowed inside arrays.
  void skip_all() {
    while (!at_end()) {
      skip_inline();
      if (at_end()) return;
      if (peek() == '#') {
        skip_comment();
      } else if (peek() == '\n' || peek() == '\r') {
        newline();
      } else {
        return;
      }
    }
  }
  void end_of_line() {
    skip_inline();
    if (at_end()) return;
    if (peek() == '#') skip_comment();
    if (at_end()) return;
    if (peek() != '\n' && peek() != '\r') fail("unexpected text after value");
    newline();
  }
  void expect(char c) {
    if (at_end() || peek() != c) fail(std::string("expected '") + c + "'");
    ++pos_;
  }

  std::string bare_key(const char* what) {
    const std::size_t start = pos_;
    while (!at_end()) {
      const char c = peek();
      if (std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '-') {
        ++pos_;
      } else {
        break;
      }
    }
    if (pos_ == start) fail(std::string("expected ") + what);
    return std::string(s_.substr(start, pos_ - start));
  }

  TomlValue parse_value() {
    if (at_end()) fail("missing value");
    TomlValue v;
    v.line = line_;
    const char c = peek();
    if (c == '"') {
      v.type = TomlValue::Type::string;
      v.text = parse_string();
    } else if (c == '[') {
      v.type = TomlValue::Type::array;
      ++pos_;
      while (true) {
        skip_all();
        if (at_end()) fail("unterminated array");
        if (peek() == ']') {
          ++pos_;
          break;
        }
        v.items.push_back(parse_value());
        skip_all();
        if (at_end()) fail("unterminated array");
        if (peek() == ',') {
          ++pos_;
        } else if (peek() != ']') {
          fail("expected ',' or ']' in array");
        }
      }
    } else if (s_.substr(pos_, 4) == "true") {
      v.type = TomlValue::Type::boolean;
      v.boolean = true;
      pos_ += 4;
    } else if (s_.substr(pos_, 5) == "false") {
      v.type = TomlValue::Type::boolean;
      pos_ += 5;
    } else {
      v.type = TomlValue::Type::number;
      const std::size_t start = pos_;
      while (!at_end()) {
        const char d = peek();
        if (std::isdigit(static_cast<unsigned char>(d)) || d == '+' || d == '-' || d == '.' ||
            d == 'e' || d == 'E' || d == '_') {
          ++pos_;
        } else {
          break;
        }
      }
      for (char d : s_.substr(start, pos_ - start)) {
        if (d != '_') v.text.push_back(d);
      }
      if (!v.text.empty() && v.text.front() == '+') v.text.erase(0, 1);
      double parsed = 0.0;
      const auto [ptr, ec] =
          std::from_chars(v.text.data(), v.text.data() + v.text.size(), parsed);
      if (v.text.empty() || ec != std::errc() || ptr != v.text.data() + v.text.size()) {
        fail("invalid value");
      }
    }
    return v;
  }

  std::string parse_string() {
    expect('"');
    std::string out;
    while (true) {
      if (at_end() || peek() == '\n') fail("unterminated string");
      const char c = s_[pos_++];
      if (c == '"') break;
      if (c != '\\') {
        out.push_back(c);
        continue;
      }
      if (at_end()) fail("unterminated string");
      const char e = s_[pos_++];
      switch (e) {
        case '"':
          out.push_back('"');
          break;
        case '\\':
          out.push_back('\\');
          break;
        case 'n':
          out.push_back('\n');
          break;
        case 't':
          out.push_back('\t');
          break;
        default:
          fail(std::string("unsupported escape '\\") + e + "'");
      }
    }
    return out;
  }

  std::string_view s_;
  const std::string& source_;
  std::size_t pos_ = 0;
  int line_ = 1;
};

// ---------------------------------------------------------------------------
// Typed access with field paths and unknown-key detection

class Section {
 public:
  Section(const TomlDocument& doc, const std::string& name, const std::string& source)
      : name_(name), source_(source) {
    auto it = doc.tables.find(name);
    if (it != doc.tables.end()) table_ = &it->second;
  }

  bool present() const { return table_ != nullptr; }

  const TomlValue* find(const std::string& key) {
    used_.insert(key);
    if (!table_) return nullptr;
    auto it = table_->values.find(key);
    return it == table_->values.end() ? nullptr : &it->second;
  }

  void reject_unknown() const {
    if (!table_) return;
    for (const auto& [key, value] : table_->values) {
      if (!used_.count(key)) {
        throw ConfigError(source_ + ":" + std::to_string(value.line) + ": " + path(key) +
                          ": unknown key");
      }
    }
  }

  std::string path(const std::string& key) const {
    return name_.empty() ? key : name_ + "." + key;
  }

  [[noreturn]] void fail(const std::string& key, const TomlValue& v,
                         const std::string& message) const {
    throw ConfigError(source_ + ":" + std::to_string(v.line) + ": " + path(key) + ": " +
                      message);
  }

  void get(const std::string& key, double& out) {
    if (const auto* v = find(key)) out = to_double(key, *v);
  }
  void get(const std::string& key, std::optional<double>& out) {
    if (const auto* v = find(key)) out = to_double(key, *v);
  }
  void get(const std::string& key, std::size_t& out) {
    if (const auto* v = find(key)) out = static_cast<std::size_t>(to_u64(key, *v));
  }
  void get(const std::string& key, int& out) {
    if (const auto* v = find(key)) {
      const std::uint64_t u = to_u64(key, *v);
      if (u > 1000000) fail(key, *v, "value too large");
      out = static_cast<int>(u);
    }
  }
  void get(const std::string& key, bool& out) {
    if (const auto* v = find(key)) {
      if (v->type != TomlValue::Type::boolean) fail(key, *v, "expected true or false");
      out = v->boolean;
    }
  }
  void get(const std::string& key, std::string& out) {
    if (const auto* v = find(key)) out = to_string_value(key, *v);
  }
  void get(const std::string& key, Vector& out) {
    if (const auto* v = find(key)) {
      out.clear();
      for (const auto& item : array(key, *v)) out.push_back(to_double(key, item));
    }
  }
  void get(const std::string& key, std::vector<std::size_t>& out) {
    if (const auto* v = find(key)) {
      out.clear();
      for (const auto& item : array(key, *v)) {
        out.push_back(static_cast<std::size_t>(to_u64(key, item)));
      }
    }
  }
  void get(const std::string& key, std::vector<std::string>& out) {
    if (const auto* v = find(key)) {
      out.clear();
      for (const auto& item : array(key, *v)) out.push_back(to_string_value(key, item));
    }
  }

  template <typename T, typename ParseFn>
  void get_enum(const std::string& key, T& out, ParseFn parse) {
    if (const auto* v = find(key)) {
      const std::string text = to_string_value(key, *v);
      const auto parsed = parse(text);
      if (!parsed) fail(key, *v, "unknown value '" + text + "'");
      out = *parsed;
    }
  }

  template <typename T, typename ParseFn>
  void get_enum_list(const std::string& key, std::vector<T>& out, ParseFn parse) {
    if (const auto* v = find(key)) {
      out.clear();
      for (const auto& item : array(key, *v)) {
        const std::string text = to_string_value(key, item);
        const auto parsed = parse(text);
        if (!parsed) fail(key, item, "unknown value '" + text + "'");
        out.push_back(*parsed);
      }
    }
  }

 private:
  const std::vector<TomlValue>& array(const std::string& key, const TomlValue& v) const {
    if (v.type != TomlValue::Type::array) fail(key, v, "expected an array");
    return v.items;
  }
  std::string to_string_value(const std::string& key, const TomlValue& v) const {
    if (v.type != TomlValue::Type::string) fail(key, v, "expected a string");
    return v.text;
  }
  double to_double(const std::string& key, const TomlValue& v) const {
    if (v.type != TomlValue::Type::number) fail(key, v, "expected a number");
    double out = 0.0;
    std::from_chars(v.text.data(), v.text.data() + v.text.size(), out);
    return out;
  }
  std::uint64_t to_u64(const std::string& key, const TomlValue& v) const {
    if (v.type != TomlValue::Type::number) fail(key, v, "expected an integer");
    std::uint64_t out = 0;
    const auto [ptr, ec] = std::from_chars(v.text.data(), v.text.data() + v.text.size(), out);
    if (ec == std::errc() && ptr == v.text.data() + v.text.size()) return out;
    // Accept integral reals such as 1e5.
    const double d = to_double(key, v);
    if (d >= 0.0 && d <= 9007199254740992.0 && std::floor(d) == d) {
      return static_cast<std::uint64_t>(d);
    }
    fail(key, v, "expected a non-negative integer");
  }

  const TomlTable* table_ = nullptr;
  std::string name_;
  const std::string& source_;
  std::set<std::string> used_;
};

std::optional<ThetaInit::Kind> parse_theta_kind(std::string_view t) {
  if (t == "fixed") return ThetaInit::Kind::fixed;
  if (t == "random_sign") return ThetaInit::Kind::random_sign;
  if (t == "gaussian") return ThetaInit::Kind::gaussian;
  return std::nullopt;
}

std::string_view theta_kind_name(ThetaInit::Kind k) {
  switch (k) {
    case ThetaInit::Kind::fixed:
      return "fixed";
    case ThetaInit::Kind::random_sign:
      return "random_sign";
    case ThetaInit::Kind::gaussian:
      return "gaussian";
  }
  return "fixed";
}

std::optional<ParticleInit::Kind> parse_particle_kind(std::string_view t) {
  if (t == "gaussian") return ParticleInit::Kind::gaussian;
  if (t == "generalized_gaussian") return ParticleInit::Kind::generalized_gaussian;
  if (t == "deterministic") return ParticleInit::Kind::deterministic;
  return std::nullopt;
}

std::string_view particle_kind_name(ParticleInit::Kind k) {
  switch (k) {
    case ParticleInit::Kind::gaussian:
      return "gaussian";
    case ParticleInit::Kind::generalized_gaussian:
      return "generalized_gaussian";
    case ParticleInit::Kind::deterministic:
      return "deterministic";
  }
  return "gaussian";
}

std::optional<ParticleInit::Mean> parse_mean_kind(std::string_view t) {
  if (t == "zero") return ParticleInit::Mean::zero;
  if (t == "theta0") return ParticleInit::Mean::theta0;
  if (t == "fixed") return ParticleInit::Mean::fixed;
  if (t == "random_uniform") return ParticleInit::Mean::random_uniform;
  return std::nullopt;
}

std::string_view mean_kind_name(ParticleInit::Mean k) {
  switch (k) {
    case ParticleInit::Mean::zero:
      return "zero";
    case ParticleInit::Mean::theta0:
      return "theta0";
    case ParticleInit::Mean::fixed:
      return "fixed";
    case ParticleInit::Mean::random_uniform:
      return "random_uniform";
  }
  return "zero";
}

const std::set<std::string>& model_names() {
  static const std::set<std::string> names = {"logistic", "toy", "mixed", "quadratic"};
  return names;
}

[[noreturn]] void invalid(const std::string& path, const std::string& message) {
  throw ConfigError(path + ": " + message);
}

bool positive_finite(double v) { return v > 0.0 && std::isfinite(v); }

// ---------------------------------------------------------------------------
// Writer helpers

std::string number(double v) {
  char buf[64];
  const auto ptr = std::to_chars(buf, buf + sizeof buf, v).ptr;
  return std::string(buf, ptr);
}

std::string quoted(std::string_view s) {
  std::string out = "\"";
  for (char c : s) {
    switch (c) {
      case '"':
        out += "\\\"";
        break;
      case '\\':
        out += "\\\\";
        break;
      case '\n':
        out += "\\n";
        break;
      case '\t':
        out += "\\t";
        break;
      default:
        out.push_back(c);
    }
  }
  return out + "\"";
}

template <typename T, typename F>
std::string list(const std::vector<T>& items, F format) {
  std::string out = "[";
  for (std::size_t i = 0; i < items.size(); ++i) {
    if (i) out += ", ";
    out += format(items[i]);
  }
  return out + "]";
}

}  // namespace

TomlDocument parse_toml(std::string_view text, const std::string& source) {
  return Parser(text, source).parse();
}

std::string_view to_string(ExperimentKind kind) {
  switch (kind) {
    case ExperimentKind::single_run:
      return "single_run";
    case ExperimentKind::n_sweep:
      return "n_sweep";
    case ExperimentKind::algorithm_comparison:
      return "algorithm_comparison";
    case ExperimentKind::variance_study:
      return "variance_study";
    case ExperimentKind::property_suite:
      return "property_suite";
  }
  return "single_run";
}

std::optional<ExperimentKind> parse_experiment_kind(std::string_view text) {
  for (auto k : {ExperimentKind::single_run, ExperimentKind::n_sweep,
                 ExperimentKind::algorithm_comparison, ExperimentKind::variance_study,
                 ExperimentKind::property_suite}) {
    if (to_string(k) == text) return k;
  }
  return std::nullopt;
}

ExperimentConfig parse_config_text(std::string_view text, const std::string& source) {
  const TomlDocument doc = parse_toml(text, source);
  static const std::set<std::string> known = {"",      "model", "run",    "init",
                                              "taming", "sweep", "output", "property_suite"};
  for (const auto& [name, table] : doc.tables) {
    if (!known.count(name)) {
      throw ConfigError(source + ":" + std::to_string(table.line) + ": [" + name +
                        "]: unknown section");
    }
  }

  ExperimentConfig c;

  Section root(doc, "", source);
  root.get_enum("experiment", c.kind, parse_experiment_kind);
  root.reject_unknown();

  Section model(doc, "model", source);
  model.get("name", c.model.name);
  model.get("d_theta", c.model.d_theta);
  model.get("d_x", c.model.d_x);
  model.get("m", c.model.m);
  model.get("sigma2", c.model.sigma2);
  model.get("n_data", c.model.n_data);
  model.get("theta_star", c.model.theta_star);
  model.get("data_seed", c.model.data_seed);
  model.get("data_path", c.model.data_path);
  model.get("mu", c.model.mu);
  model.get("ell", c.model.ell);
  model.reject_unknown();

  Section run(doc, "run", source);
  run.get_enum("algorithm", c.run.algorithm, parse_algorithm);
  run.get("lambda", c.run.lambda);
  run.get("n_particles", c.run.n_particles);
  run.get("n_steps", c.run.n_steps);
  run.get("seed", c.run.seed);
  run.get("record_every", c.run.record_every);
  run.get("threads", c.run.threads);
  run.get("stop_on_divergence", c.run.stop_on_divergence);
  run.get("strict", c.run.strict);
  run.reject_unknown();

  Section taming(doc, "taming", source);
  if (taming.find("kind")) {
    TamingKind kind = TamingKind::none;
    taming.get_enum("kind", kind, parse_taming_kind);
    c.run.taming = kind;
  }
  taming.reject_unknown();

  Section init(doc, "init", source);
  auto& ti = c.run.init.theta;
  auto& pi = c.run.init.particles;
  init.get_enum("theta", ti.kind, parse_theta_kind);
  init.get("theta0", ti.value);
  init.get("theta_scale", ti.scale);
  init.get_enum("particles", pi.kind, parse_particle_kind);
  init.get_enum("particle_mean", pi.mean, parse_mean_kind);
  init.get("particle_mean_value", pi.mean_value);
  init.get("particle_mean_range", pi.mean_range);
  init.get("particle_variance", pi.variance);
  init.get("particle_values", pi.value);
  init.reject_unknown();

  Section sweep(doc, "sweep", source);
  sweep.get("n_values", c.sweep.n_values);
  sweep.get("repeats", c.sweep.repeats);
  sweep.get_enum_list("algorithms", c.sweep.algorithms, parse_algorithm);
  sweep.get("threads", c.sweep.threads);
  sweep.reject_unknown();

  Section output(doc, "output", source);
  output.get("dir", c.output.dir);
  output.get("burn_in", c.output.burn_in);
  output.get("write_trajectories", c.output.write_trajectories);
  output.reject_unknown();

  Section suite(doc, "property_suite", source);
  suite.get("models", c.suite.models);
  suite.get_enum_list("taming_kinds", c.suite.taming_kinds, parse_taming_kind);
  suite.get("samples", c.suite.samples);
  suite.get("lambdas", c.suite.lambdas);
  suite.get("n_particles", c.suite.n_particles);
  suite.get("radius", c.suite.radius);
  suite.get("seed", c.suite.seed);
  suite.get("mu_scale", c.suite.mu_scale);
  suite.get("scaled_models", c.suite.scaled_models);
  suite.reject_unknown();

  // Logistic models are square: one latent coordinate per parameter.
  if (c.model.name == "logistic" && model.present() && !model.find("d_x")) {
    c.model.d_x = c.model.d_theta;
  }

  validate_config(c);
  return c;
}

ExperimentConfig parse_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot read config file '" + path + "'");
  std::stringstream buffer;
  buffer << in.rdbuf();
  return parse_config_text(buffer.str(), path);
}

void validate_config(const ExperimentConfig& c) {
  const auto& m = c.model;
  if (!model_names().count(m.name)) invalid("model.name", "unknown model '" + m.name + "'");
  if (m.d_theta < 1) invalid("model.d_theta", "must be >= 1");
  if (m.d_x < 1) invalid("model.d_x", "must be >= 1");
  if (m.name == "toy" && m.m < 1) invalid("model.m", "must be >= 1");
  if (m.name == "mixed" || m.name == "quadratic" || m.name == "logistic") {
    if (m.d_theta != m.d_x) invalid("model.d_x", "must equal d_theta for model '" + m.name + "'");
  }
  if (m.name == "logistic") {
    if (!positive_finite(m.sigma2)) invalid("model.sigma2", "must be > 0");
    if (m.data_path.empty() && m.n_data < 1) invalid("model.n_data", "must be >= 1");
    if (!m.theta_star.empty() && m.theta_star.size() != m.d_theta) {
      invalid("model.theta_star", "expected " + std::to_string(m.d_theta) + " values");
    }
  }
  if (m.mu && !positive_finite(*m.mu)) invalid("model.mu", "must be > 0");
  if (m.ell && !positive_finite(*m.ell)) invalid("model.ell", "must be > 0");

  const auto& r = c.run;
  if (!positive_finite(r.lambda)) invalid("run.lambda", "must be a finite number > 0");
  if (r.n_particles < 1) invalid("run.n_particles", "must be >= 1");
  if (r.threads < 1) invalid("run.threads", "must be >= 1");
  if (r.record_every < 1) invalid("run.record_every", "must be >= 1");
  const auto& ti = r.init.theta;
  if (ti.kind == ThetaInit::Kind::fixed && !ti.value.empty() && ti.value.size() != m.d_theta) {
    invalid("init.theta0", "expected " + std::to_string(m.d_theta) + " values");
  }
  if (!(ti.scale >= 0.0) || !std::isfinite(ti.scale)) invalid("init.theta_scale", "must be >= 0");
  const auto& pi = r.init.particles;
  if (pi.mean == ParticleInit::Mean::theta0 && m.d_theta != m.d_x &&
      pi.kind != ParticleInit::Kind::deterministic) {
    invalid("init.particle_mean", "theta0 requires d_theta == d_x");
  }
  if (pi.mean == ParticleInit::Mean::fixed && pi.mean_value.size() != m.d_x) {
    invalid("init.particle_mean_value", "expected " + std::to_string(m.d_x) + " values");
  }
  if (!(pi.mean_range >= 0.0) || !std::isfinite(pi.mean_range)) {
    invalid("init.particle_mean_range", "must be >= 0");
  }
  if (!(pi.variance >= 0.0) || !std::isfinite(pi.variance) ||
      (pi.kind == ParticleInit::Kind::generalized_gaussian && pi.variance == 0.0)) {
    invalid("init.particle_variance", "out of range");
  }

  const auto& s = c.sweep;
  const bool uses_n = c.kind == ExperimentKind::n_sweep || c.kind == ExperimentKind::variance_study;
  if (uses_n && s.n_values.empty()) invalid("sweep.n_values", "must not be empty");
  for (std::size_t j = 0; j < s.n_values.size(); ++j) {
    if (s.n_values[j] < 1 || (j > 0 && s.n_values[j] <= s.n_values[j - 1])) {
      invalid("sweep.n_values", "must be positive and strictly increasing");
    }
  }
  if (s.repeats < 1) invalid("sweep.repeats", "must be >= 1");
  if (s.threads < 1) invalid("sweep.threads", "must be >= 1");
  if (c.kind == ExperimentKind::algorithm_comparison && s.algorithms.empty()) {
    invalid("sweep.algorithms", "must not be empty");
  }

  if (!(c.output.burn_in >= 0.0 && c.output.burn_in < 1.0)) {
    invalid("output.burn_in", "must lie in [0, 1)");
  }
  if (c.output.dir.empty()) invalid("output.dir", "must not be empty");

  const auto& p = c.suite;
  for (const auto& name : p.models) {
    if (!model_names().count(name)) invalid("property_suite.models", "unknown model '" + name + "'");
  }
  for (const auto& name : p.scaled_models) {
    if (!model_names().count(name)) {
      invalid("property_suite.scaled_models", "unknown model '" + name + "'");
    }
  }
  if (p.samples < 1) invalid("property_suite.samples", "must be >= 1");
  for (double l : p.lambdas) {
    if (!positive_finite(l)) invalid("property_suite.lambdas", "must be > 0");
  }
  for (std::size_t n : p.n_particles) {
    if (n < 1) invalid("property_suite.n_particles", "must be >= 1");
  }
  if (!positive_finite(p.radius)) invalid("property_suite.radius", "must be > 0");
  if (!positive_finite(p.mu_scale)) invalid("property_suite.mu_scale", "must be > 0");
}

std::string write_config(const ExperimentConfig& c) {
  std::ostringstream o;
  const auto nums = [](const Vector& v) { return list(v, number); };
  const auto sizes = [](const std::vector<std::size_t>& v) {
    return list(v, [](std::size_t n) { return std::to_string(n); });
  };
  const auto strs = [](const std::vector<std::string>& v) { return list(v, quoted); };
  const auto flag = [](bool b) { return b ? "true" : "false"; };

  o << "experiment = " << quoted(to_string(c.kind)) << "\n\n";

  const auto& m = c.model;
  o << "[model]\n"
    << "name = " << quoted(m.name) << "\n"
    << "d_theta = " << m.d_theta << "\n"
    << "d_x = " << m.d_x << "\n"
    << "m = " << m.m << "\n"
    << "sigma2 = " << number(m.sigma2) << "\n"
    << "n_data = " << m.n_data << "\n"
    << "theta_star = " << nums(m.theta_star) << "\n"
    << "data_seed = " << m.data_seed << "\n"
    << "data_path = " << quoted(m.data_path) << "\n";
  if (m.mu) o << "mu = " << number(*m.mu) << "\n";
  if (m.ell) o << "ell = " << number(*m.ell) << "\n";

  const auto& r = c.run;
  o << "\n[run]\n"
    << "algorithm = " << quoted(to_string(r.algorithm)) << "\n"
    << "lambda = " << number(r.lambda) << "\n"
    << "n_particles = " << r.n_particles << "\n"
    << "n_steps = " << r.n_steps << "\n"
    << "seed = " << r.seed << "\n"
    << "record_every = " << r.record_every << "\n"
    << "threads = " << r.threads << "\n"
    << "stop_on_divergence = " << flag(r.stop_on_divergence) << "\n"
    << "strict = " << flag(r.strict) << "\n";

  if (r.taming) o << "\n[taming]\nkind = " << quoted(to_string(*r.taming)) << "\n";

  const auto& ti = r.init.theta;
  const auto& pi = r.init.particles;
  o << "\n[init]\n"
    << "theta = " << quoted(theta_kind_name(ti.kind)) << "\n"
    << "theta0 = " << nums(ti.value) << "\n"
    << "theta_scale = " << number(ti.scale) << "\n"
    << "particles = " << quoted(particle_kind_name(pi.kind)) << "\n"
    << "particle_mean = " << quoted(mean_kind_name(pi.mean)) << "\n"
    << "particle_mean_value = " << nums(pi.mean_value) << "\n"
    << "particle_mean_range = " << number(pi.mean_range) << "\n"
    << "particle_variance = " << number(pi.variance) << "\n"
    << "particle_values = " << nums(pi.value) << "\n";

  const auto& s = c.sweep;
  o << "\n[sweep]\n"
    << "n_values = " << sizes(s.n_values) << "\n"
    << "repeats = " << s.repeats << "\n"
    << "algorithms = "
    << list(s.algorithms, [](Algorithm a) { return quoted(to_string(a)); }) << "\n"
    << "threads = " << s.threads << "\n";

  o << "\n[output]\n"
    << "dir = " << quoted(c.output.dir) << "\n"
    << "burn_in = " << number(c.output.burn_in) << "\n"
    << "write_trajectories = " << flag(c.output.write_trajectories) << "\n";

  const auto& p = c.suite;
  o << "\n[property_suite]\n"
    << "models = " << strs(p.models) << "\n"
    << "taming_kinds = "
    << list(p.taming_kinds, [](TamingKind k) { return quoted(to_string(k)); }) << "\n"
    << "samples = " << p.samples << "\n"
    << "lambdas = " << nums(p.lambdas) << "\n"
    << "n_particles = " << sizes(p.n_particles) << "\n"
    << "radius = " << number(p.radius) << "\n"
    << "seed = " << p.seed << "\n"
    << "mu_scale = " << number(p.mu_scale) << "\n"
    << "scaled_models = " << strs(p.scaled_models) << "\n";
  return o.str();
}

ModelPtr build_model(const ModelConfig& c) {
  ModelPtr model;
  if (c.name == "logistic") {
    LogisticParams params;
    params.sigma2 = c.sigma2;
    std::optional<Vector> theta_star;
    if (!c.theta_star.empty()) theta_star = c.theta_star;
    if (!c.data_path.empty()) {
      params.data = load_logistic_csv(c.data_path);
      if (params.data.dim != c.d_theta) {
        throw ConfigError("model.data_path: data has " + std::to_string(params.data.dim) +
                          " feature columns, expected " + std::to_string(c.d_theta));
      }
    } else {
      const Vector truth = theta_star.value_or(Vector(c.d_theta, 0.0));
      params.data = synthesize_logistic_data(c.d_theta, c.n_data, c.sigma2, truth, c.data_seed);
    }
    model = std::make_shared<LogisticRegressionModel>(std::move(params), theta_star);
  } else if (c.name == "toy") {
    model = std::make_shared<HigherOrderToyModel>(c.m, c.d_theta, c.d_x);
  } else if (c.name == "mixed") {
    model = std::make_shared<MixedTermToyModel>(c.d_theta);
  } else if (c.name == "quadratic") {
    model = std::make_shared<QuadraticModel>(c.d_theta);
  } else {
    throw ConfigError("model.name: unknown model '" + c.name + "'");
  }
  if (c.mu) model->set_convexity_mu(*c.mu);
  if (c.ell) model->set_growth_order(*c.ell);
  return model;
}

ModelPtr build_default_model(const std::string& name) {
  ModelConfig c;
  c.name = name;
  if (name == "logistic") {
    c.d_theta = c.d_x = 3;
    c.n_data = 100;
    c.theta_star = {2.0, 5.0, -1.0};
  }
  return build_model(c);
}

}  // namespace tipla
