#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "vortexpatch/grid.hpp"
#include "vortexpatch/maximizer.hpp"

namespace vpl {

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Flat key/value configuration parsed from an INI-style file:
/// [section] headers, key = value lines, '#' comments. Keys are addressed
/// as dotted paths ("domain.radius") both in code and via CLI overrides.
class Config {
 public:
  Config() = default;
  static Config from_file(const std::filesystem::path& path);
  static Config from_string(const std::string& text);

  /// Applies an override of the form "section.key=value".
  void apply_override(const std::string& assignment);

  bool has(const std::string& key) const;
  std::string get_string(const std::string& key) const;
  std::string get_string(const std::string& key, const std::string& fallback) const;
  double get_double(const std::string& key) const;
  double get_double(const std::string& key, double fallback) const;
  int get_int(const std::string& key) const;
  int get_int(const std::string& key, int fallback) const;
  std::uint64_t get_uint64(const std::string& key, std::uint64_t fallback) const;
  bool get_bool(const std::string& key, bool fallback) const;
  std::vector<double> get_double_list(const std::string& key) const;
  std::vector<std::string> get_string_list(const std::string& key) const;

  /// Sorted "key = value" lines for CSV header echoes.
  std::vector<std::string> echo_lines() const;

 private:
  std::map<std::string, std::string> values_;
};

/// Domain/grid/patch assembly shared by all subcommands.
Domain domain_from_config(const Config& cfg);
Grid grid_from_config(const Config& cfg);
PatchSpec patch_spec_from_config(const Config& cfg);

}  // namespace vpl
