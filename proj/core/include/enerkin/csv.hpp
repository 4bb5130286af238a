#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "enerkin/solver.hpp"
#include "enerkin/types.hpp"

namespace enerkin {

/// Shortest decimal that parses back to the same double.
std::string format_double(double x);

/// Rows "type_id,kinetic_energy", sorted by (type, energy) so that the file
/// does not depend on particle order.
std::string particles_csv(const ParticleSystem& state);
ParticleSystem parse_particles_csv(const std::string& text);

/// Rows "type_id,x_center,density".
std::string grid_csv(const DensityGrid& grid);

/// Header plus rows of numbers.
std::string table_csv(const std::vector<std::string>& header,
                      const std::vector<std::vector<double>>& rows);

void write_text_file(const std::filesystem::path& path, const std::string& text);
std::string read_text_file(const std::filesystem::path& path);

}  // namespace enerkin
