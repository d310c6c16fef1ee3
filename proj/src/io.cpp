#include "vortexpatch/io.hpp"

#include <bit>
#include <cmath>
#include <cstdio>
#include <cstring>

namespace vpl {

static_assert(std::endian::native == std::endian::little,
              "field dump code assumes a little-endian host");

namespace {
constexpr char kMagic[4] = {'V', 'P', 'L', '1'};

template <typename T>
void put(std::ofstream& out, T v) {
  out.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <typename T>
T get(std::ifstream& in) {
  T v{};
  in.read(reinterpret_cast<char*>(&v), sizeof(T));
  if (!in) throw DumpError("field dump: truncated file");
  return v;
}
}  // namespace

void write_field_dump(const std::filesystem::path& path, const Grid& grid, const Field& field) {
  if (field.size() != grid.mask().size())
    throw std::invalid_argument("write_field_dump: field size does not match grid");
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DumpError("field dump: cannot open " + path.string() + " for writing");
  out.write(kMagic, 4);
  put<std::uint32_t>(out, static_cast<std::uint32_t>(grid.nx()));
  put<std::uint32_t>(out, static_cast<std::uint32_t>(grid.ny()));
  put<double>(out, grid.h());
  put<double>(out, grid.origin().x);
  put<double>(out, grid.origin().y);
  for (std::size_t c = 0; c < field.size(); ++c) {
    double v = grid.interior_flat(static_cast<int>(c)) ? field[c] : 0.0;
    put<double>(out, v);
  }
  if (!out) throw DumpError("field dump: write failed for " + path.string());
}

FieldDump read_field_dump(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DumpError("field dump: cannot open " + path.string());
  char magic[4];
  in.read(magic, 4);
  if (!in || std::memcmp(magic, kMagic, 4) != 0) {
    char shown[5] = {0, 0, 0, 0, 0};
    std::memcpy(shown, magic, in ? 4 : 0);
    throw DumpError(std::string("field dump: bad magic bytes \"") + shown +
                    "\" (expected \"VPL1\") in " + path.string());
  }
  FieldDump d;
  d.nx = get<std::uint32_t>(in);
  d.ny = get<std::uint32_t>(in);
  d.h = get<double>(in);
  d.origin_x = get<double>(in);
  d.origin_y = get<double>(in);
  if (d.nx == 0 || d.ny == 0 || !(d.h > 0.0))
    throw DumpError("field dump: invalid header in " + path.string());
  d.values.resize(static_cast<std::size_t>(d.nx) * d.ny);
  in.read(reinterpret_cast<char*>(d.values.data()),
          static_cast<std::streamsize>(d.values.size() * sizeof(double)));
  if (!in) throw DumpError("field dump: truncated payload in " + path.string());
  return d;
}

Field load_field_for_grid(const std::filesystem::path& path, const Grid& grid) {
  FieldDump d = read_field_dump(path);
  if (static_cast<int>(d.nx) != grid.nx() || static_cast<int>(d.ny) != grid.ny())
    throw DumpError("field dump: grid shape mismatch in " + path.string());
  if (std::abs(d.h - grid.h()) > 1e-12 * grid.h())
    throw DumpError("field dump: grid spacing mismatch in " + path.string());
  return d.values;
}

std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

CsvWriter::CsvWriter(const std::filesystem::path& path,
                     const std::vector<std::string>& config_echo,
                     const std::vector<std::string>& columns)
    : out_(path) {
  if (!out_) throw DumpError("csv: cannot open " + path.string() + " for writing");
  for (const auto& line : config_echo) out_ << "# " << line << "\n";
  for (std::size_t k = 0; k < columns.size(); ++k)
    out_ << columns[k] << (k + 1 < columns.size() ? "," : "\n");
}

void CsvWriter::row(const std::vector<double>& values) {
  for (std::size_t k = 0; k < values.size(); ++k)
    out_ << format_double(values[k]) << (k + 1 < values.size() ? "," : "\n");
}

void CsvWriter::raw_line(const std::string& line) { out_ << line << "\n"; }

}  // namespace vpl
