#include "enerkin/csv.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <sstream>

#include "enerkin/error.hpp"

namespace enerkin {

std::string format_double(double x) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, res.ptr);
}

std::string particles_csv(const ParticleSystem& state) {
  auto sorted = state.particles;
  std::sort(sorted.begin(), sorted.end(), [](const Particle& a, const Particle& b) {
    return a.type != b.type ? a.type < b.type : a.kinetic_energy < b.kinetic_energy;
  });
  std::string out = "type_id,kinetic_energy\n";
  for (const auto& p : sorted) {
    out += std::to_string(p.type);
    out += ',';
    out += format_double(p.kinetic_energy);
    out += '\n';
  }
  return out;
}

ParticleSystem parse_particles_csv(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line) || line != "type_id,kinetic_energy")
    throw ValidationError("particles csv: expected header 'type_id,kinetic_energy'");
  ParticleSystem s;
  std::size_t row = 1;
  while (std::getline(in, line)) {
    ++row;
    if (line.empty()) continue;
    const auto comma = line.find(',');
    Particle p;
    const char* begin = line.data();
    const char* end = line.data() + line.size();
    const auto r1 = std::from_chars(begin, begin + (comma == std::string::npos ? 0 : comma), p.type);
    const auto r2 = comma == std::string::npos
                        ? std::from_chars_result{begin, std::errc::invalid_argument}
                        : std::from_chars(begin + comma + 1, end, p.kinetic_energy);
    if (r1.ec != std::errc{} || r2.ec != std::errc{} || r2.ptr != end)
      throw ValidationError("particles csv: malformed row " + std::to_string(row));
    s.particles.push_back(p);
  }
  return s;
}

std::string grid_csv(const DensityGrid& grid) {
  std::string out = "type_id,x_center,density\n";
  for (int v = 1; v <= grid.type_count(); ++v)
    for (int k = 0; k < grid.n_cells; ++k) {
      out += std::to_string(v);
      out += ',';
      out += format_double(grid.center(k));
      out += ',';
      out += format_double(grid[v][static_cast<std::size_t>(k)]);
      out += '\n';
    }
  return out;
}

std::string table_csv(const std::vector<std::string>& header,
                      const std::vector<std::vector<double>>& rows) {
  std::string out;
  for (std::size_t i = 0; i < header.size(); ++i) {
    if (i) out += ',';
    out += header[i];
  }
  out += '\n';
  for (const auto& row : rows) {
    for (std::size_t i = 0; i < row.size(); ++i) {
      if (i) out += ',';
      out += format_double(row[i]);
    }
    out += '\n';
  }
  return out;
}

void write_text_file(const std::filesystem::path& path, const std::string& text) {
  std::error_code ec;
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path(), ec);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write '" + path.string() + "'");
  out << text;
  if (!out) throw IoError("write failed for '" + path.string() + "'");
}

std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot read '" + path.string() + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace enerkin
