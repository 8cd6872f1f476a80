#include "tipla/io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <ostream>
#include <sstream>

namespace tipla {

std::string format_double(double value) {
  if (std::isnan(value)) return "nan";
  if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
  char buf[64];
  const auto ptr = std::to_chars(buf, buf + sizeof buf, value).ptr;
  return std::string(buf, ptr);
}

void write_trajectory_csv(std::ostream& out, const Trajectory& trajectory) {
  const std::size_t d = trajectory.records.empty() ? trajectory.final_state.theta.size()
                                                   : trajectory.records.front().theta.size();
  out << "step";
  for (std::size_t k = 0; k < d; ++k) out << ",theta_" << k;
  out << ",rescaled_norm_sq,diverged\n";
  for (const auto& r : trajectory.records) {
    out << r.step;
    for (double v : r.theta) out << ',' << format_double(v);
    out << ',' << format_double(r.rescaled_norm_sq) << ',' << (r.diverged ? 1 : 0) << '\n';
  }
}

void write_trajectory_csv(const std::filesystem::path& path, const Trajectory& trajectory) {
  std::ostringstream buffer;
  write_trajectory_csv(buffer, trajectory);
  write_text_file(path, buffer.str());
}

void write_scaling_csv(const std::filesystem::path& path, const ScalingReport& report) {
  std::size_t d = 0;
  for (const auto& e : report.entries) d = std::max(d, e.variance.size());
  std::ostringstream out;
  out << "n_particles,repeats,diverged_repeats,valid,mean_variance";
  for (std::size_t k = 0; k < d; ++k) out << ",variance_" << k;
  out << '\n';
  for (const auto& e : report.entries) {
    out << e.n_particles << ',' << e.repeats << ',' << e.diverged_repeats << ','
        << (e.valid ? 1 : 0) << ',' << (e.valid ? format_double(e.mean_variance) : "nan");
    for (std::size_t k = 0; k < d; ++k) {
      out << ',' << (k < e.variance.size() ? format_double(e.variance[k]) : "nan");
    }
    out << '\n';
  }
  write_text_file(path, out.str());
}

void write_text_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
  out << text;
  out.close();
  if (!out) throw IoError("failed writing '" + path.string() + "'");
}

std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot read '" + path.string() + "'");
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

void ensure_directory(const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec || !std::filesystem::is_directory(dir)) {
    throw IoError("cannot create output directory '" + dir.string() + "'");
  }
}

}  // namespace tipla
