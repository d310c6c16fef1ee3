#pragma once

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "vortexpatch/grid.hpp"

namespace vpl {

struct DumpError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Header of the binary field dump: magic "VPL1", nx and ny as 4-byte
/// unsigned little-endian, then h, origin_x, origin_y as 8-byte
/// little-endian doubles (36 bytes total), followed by nx*ny row-major
/// 8-byte little-endian values, exterior cells stored as zero.
struct FieldDump {
  std::uint32_t nx = 0, ny = 0;
  double h = 0.0;
  double origin_x = 0.0, origin_y = 0.0;
  std::vector<double> values;
};

void write_field_dump(const std::filesystem::path& path, const Grid& grid, const Field& field);
FieldDump read_field_dump(const std::filesystem::path& path);

/// Reads a dump and checks it against the grid geometry.
Field load_field_for_grid(const std::filesystem::path& path, const Grid& grid);

/// CSV writer that prefixes every file with '#'-comment lines echoing the
/// resolved configuration, then a column header. Numeric cells are written
/// with round-trip precision so identical runs are byte-identical.
class CsvWriter {
 public:
  CsvWriter(const std::filesystem::path& path, const std::vector<std::string>& config_echo,
            const std::vector<std::string>& columns);
  void row(const std::vector<double>& values);
  void raw_line(const std::string& line);

 private:
  std::ofstream out_;
};

std::string format_double(double v);

}  // namespace vpl
