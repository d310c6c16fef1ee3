#include "vortexpatch/config.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <sstream>

namespace vpl {

namespace {
std::string trim(const std::string& s) {
  auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}
}  // namespace

Config Config::from_string(const std::string& text) {
  Config cfg;
  std::istringstream in(text);
  std::string line, section;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']')
        throw ConfigError("config line " + std::to_string(lineno) + ": unterminated section");
      section = trim(line.substr(1, line.size() - 2));
      continue;
    }
    auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError("config line " + std::to_string(lineno) + ": expected key = value");
    std::string key = trim(line.substr(0, eq));
    std::string value = trim(line.substr(eq + 1));
    if (key.empty())
      throw ConfigError("config line " + std::to_string(lineno) + ": empty key");
    cfg.values_[section.empty() ? key : section + "." + key] = value;
  }
  return cfg;
}

Config Config::from_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return from_string(ss.str());
}

void Config::apply_override(const std::string& assignment) {
  auto eq = assignment.find('=');
  if (eq == std::string::npos)
    throw ConfigError("override must look like section.key=value: " + assignment);
  std::string key = trim(assignment.substr(0, eq));
  std::string value = trim(assignment.substr(eq + 1));
  if (key.empty()) throw ConfigError("override with empty key: " + assignment);
  values_[key] = value;
}

bool Config::has(const std::string& key) const { return values_.count(key) != 0; }

std::string Config::get_string(const std::string& key) const {
  auto it = values_.find(key);
  if (it == values_.end()) throw ConfigError("missing config field: " + key);
  return it->second;
}

std::string Config::get_string(const std::string& key, const std::string& fallback) const {
  auto it = values_.find(key);
  return it == values_.end() ? fallback : it->second;
}

double Config::get_double(const std::string& key) const {
  std::string s = get_string(key);
  try {
    std::size_t pos = 0;
    double v = std::stod(s, &pos);
    if (pos != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw ConfigError("config field " + key + ": not a number: " + s);
  }
}

double Config::get_double(const std::string& key, double fallback) const {
  return has(key) ? get_double(key) : fallback;
}

int Config::get_int(const std::string& key) const {
  std::string s = get_string(key);
  try {
    std::size_t pos = 0;
    long v = std::stol(s, &pos);
    if (pos != s.size()) throw std::invalid_argument(s);
    return static_cast<int>(v);
  } catch (const std::exception&) {
    throw ConfigError("config field " + key + ": not an integer: " + s);
  }
}

int Config::get_int(const std::string& key, int fallback) const {
  return has(key) ? get_int(key) : fallback;
}

std::uint64_t Config::get_uint64(const std::string& key, std::uint64_t fallback) const {
  if (!has(key)) return fallback;
  std::string s = get_string(key);
  try {
    return std::stoull(s);
  } catch (const std::exception&) {
    throw ConfigError("config field " + key + ": not an unsigned integer: " + s);
  }
}

bool Config::get_bool(const std::string& key, bool fallback) const {
  if (!has(key)) return fallback;
  std::string s = get_string(key);
  std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return std::tolower(c); });
  if (s == "true" || s == "1" || s == "yes" || s == "on") return true;
  if (s == "false" || s == "0" || s == "no" || s == "off") return false;
  throw ConfigError("config field " + key + ": not a boolean: " + s);
}

std::vector<std::string> Config::get_string_list(const std::string& key) const {
  std::string s = get_string(key);
  std::vector<std::string> out;
  std::istringstream in(s);
  std::string item;
  while (std::getline(in, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

std::vector<double> Config::get_double_list(const std::string& key) const {
  std::vector<double> out;
  for (const auto& item : get_string_list(key)) {
    try {
      out.push_back(std::stod(item));
    } catch (const std::exception&) {
      throw ConfigError("config field " + key + ": not a number: " + item);
    }
  }
  return out;
}

std::vector<std::string> Config::echo_lines() const {
  std::vector<std::string> out;
  out.reserve(values_.size());
  for (const auto& [k, v] : values_) out.push_back(k + " = " + v);
  return out;
}

Domain domain_from_config(const Config& cfg) {
  std::string kind = cfg.get_string("domain.kind");
  Vec2 center{cfg.get_double("domain.center_x", 0.0), cfg.get_double("domain.center_y", 0.0)};
  try {
    if (kind == "disk") return Domain::disk(cfg.get_double("domain.radius"), center);
    if (kind == "annulus")
      return Domain::annulus(cfg.get_double("domain.inner"), cfg.get_double("domain.outer"),
                             center);
    if (kind == "rectangle")
      return Domain::rectangle(cfg.get_double("domain.width"), cfg.get_double("domain.height"));
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("domain: ") + e.what());
  }
  throw ConfigError("domain.kind must be disk, annulus or rectangle (got " + kind + ")");
}

Grid grid_from_config(const Config& cfg) {
  int resolution = cfg.get_int("grid.resolution");
  try {
    return build_grid(domain_from_config(cfg), resolution);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("grid: ") + e.what());
  }
}

PatchSpec patch_spec_from_config(const Config& cfg) {
  PatchSpec spec;
  spec.lambda = cfg.get_double("patch.lambda");
  spec.mass = cfg.get_double("patch.mass", 1.0);
  if (!(spec.lambda > 0.0)) throw ConfigError("patch.lambda must be positive");
  if (!(spec.mass > 0.0)) throw ConfigError("patch.mass must be positive");
  return spec;
}

}  // namespace vpl
