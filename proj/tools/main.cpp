#ifdef TIPLA_CLI11_SINGLE_HEADER
#include <CLI11.hpp>
#else
#include <CLI/CLI.hpp>
#endif

#include <cstdint>
#include <iostream>
#include <optional>
#include <string>

#include "tipla/config.hpp"
#include "tipla/errors.hpp"
#include "tipla/experiment.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Tamed interacting particle Langevin samplers"};
  std::string config_path;
  std::optional<std::string> out_dir;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> threads;
  bool strict = false;
  bool quiet = false;
  app.add_option("--config", config_path, "experiment config (TOML)")->required();
  app.add_option("--out", out_dir, "output directory (overrides output.dir)");
  app.add_option("--seed", seed, "master seed (overrides run.seed)");
  app.add_option("--threads", threads, "worker threads")->check(CLI::PositiveNumber);
  app.add_flag("--strict", strict, "treat stepsize-constraint violations as errors");
  app.add_flag("--quiet", quiet, "suppress progress and warnings");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? tipla::kExitOk : tipla::kExitValidation;
  }

  tipla::ExperimentConfig config;
  try {
    config = tipla::apply_overrides(tipla::parse_config(config_path),
                                    {seed, out_dir, threads, strict});
  } catch (const tipla::IoError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return tipla::kExitIo;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << '\n';
    return tipla::kExitValidation;
  }

  const auto result = tipla::run_experiment(config, quiet ? nullptr : &std::cerr);
  if (!quiet) {
    for (const auto& w : result.warnings) std::cerr << "warning: " << w << '\n';
    for (const auto& a : result.artifacts) std::cout << a << '\n';
  }
  if (result.exit_code != tipla::kExitOk) std::cerr << "error: " << result.error << '\n';
  return result.exit_code;
}
