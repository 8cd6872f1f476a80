#ifndef TIPLA_IO_HPP_
#define TIPLA_IO_HPP_

#include <filesystem>
#include <iosfwd>
#include <string>

#include "tipla/metrics.hpp"
#include "tipla/sampler.hpp"

namespace tipla {

// Shortest decimal that parses back to the same double; "nan", "inf", "-inf"
// for non-finite values.
std::string format_double(double value);

// Header: step,theta_0,...,theta_{d-1},rescaled_norm_sq,diverged
void write_trajectory_csv(std::ostream& out, const Trajectory& trajectory);
void write_trajectory_csv(const std::filesystem::path& path, const Trajectory& trajectory);

// Header: n_particles,repeats,diverged_repeats,valid,mean_variance,variance_0,...
void write_scaling_csv(const std::filesystem::path& path, const ScalingReport& report);

// Throws IoError on failure.
void write_text_file(const std::filesystem::path& path, const std::string& text);
std::string read_text_file(const std::filesystem::path& path);
void ensure_directory(const std::filesystem::path& dir);

}  // namespace tipla

#endif  // TIPLA_IO_HPP_
