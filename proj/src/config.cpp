#include "tcmom/config.hpp"

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "tcmom/errors.hpp"

namespace tcmom {
namespace {

std::string trim(const std::string& s) {
  const auto a = s.find_first_not_of(" \t\r\n");
  if (a == std::string::npos) return {};
  const auto b = s.find_last_not_of(" \t\r\n");
  return s.substr(a, b - a + 1);
}

[[noreturn]] void bad(const std::string& msg) {
  fail(ErrorKind::ConfigError, msg);
}

double parse_num(const std::string& key, const std::string& value) {
  std::size_t used = 0;
  double x = 0.0;
  try {
    x = std::stod(value, &used);
  } catch (const std::exception&) {
    bad("key '" + key + "' expects a number, got '" + value + "'");
  }
  if (used != value.size() || !std::isfinite(x))
    bad("key '" + key + "' expects a number, got '" + value + "'");
  return x;
}

int parse_int(const std::string& key, const std::string& value) {
  const double x = parse_num(key, value);
  const int i = static_cast<int>(std::lround(x));
  if (x != static_cast<double>(i))
    bad("key '" + key + "' expects an integer, got '" + value + "'");
  return i;
}

SlotRect parse_slot(const std::string& value) {
  std::istringstream is(value);
  SlotRect r;
  std::string extra;
  if (!(is >> r.center_x_mm >> r.center_y_mm >> r.length_mm >> r.width_mm) ||
      (is >> extra))
    bad("key 'slot' expects four numbers: center_x center_y length width (mm), got '" +
        value + "'");
  return r;
}

// Shortest decimal that round-trips the double exactly.
std::string num(double x) {
  char buf[64];
  for (int prec = 1; prec <= 17; ++prec) {
    std::snprintf(buf, sizeof buf, "%.*g", prec, x);
    if (std::stod(buf) == x) break;
  }
  return buf;
}

void set_key(RunConfig& c, const std::string& key, const std::string& value) {
  if (key == "scene")
    c.scene = value;
  else if (key == "chassis_x_mm")
    c.chassis_x_mm = parse_num(key, value);
  else if (key == "chassis_y_mm")
    c.chassis_y_mm = parse_num(key, value);
  else if (key == "cell_mm")
    c.cell_mm = parse_num(key, value);
  else if (key == "slot")
    c.slot = parse_slot(value);
  else if (key == "z0_ohm")
    c.z0_ohm = parse_num(key, value);
  else if (key == "freq_start_GHz")
    c.freq_start_GHz = parse_num(key, value);
  else if (key == "freq_stop_GHz")
    c.freq_stop_GHz = parse_num(key, value);
  else if (key == "freq_step_GHz")
    c.freq_step_GHz = parse_num(key, value);
  else if (key == "n_modes")
    c.n_modes = parse_int(key, value);
  else if (key == "significance_threshold")
    c.significance_threshold = parse_num(key, value);
  else if (key == "null_threshold")
    c.null_threshold = parse_num(key, value);
  else if (key == "window_area_fraction")
    c.window_area_fraction = parse_num(key, value);
  else if (key == "min_correlation")
    c.min_correlation = parse_num(key, value);
  else if (key == "reflection_threshold_db")
    c.reflection_threshold_db = parse_num(key, value);
  else if (key == "band_lo_GHz")
    c.band_lo_GHz = parse_num(key, value);
  else if (key == "band_hi_GHz")
    c.band_hi_GHz = parse_num(key, value);
  else if (key == "out_dir")
    c.out_dir = value;
  else
    bad("unknown key '" + key + "'");
}

}  // namespace

RunConfig parse_config(const std::string& text) {
  RunConfig c;
  std::istringstream is(text);
  std::string line;
  int lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      bad("line " + std::to_string(lineno) + ": expected key = value, got '" +
          line + "'");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty()) bad("line " + std::to_string(lineno) + ": empty key");
    set_key(c, key, value);
  }
  validate_config(c);
  return c;
}

RunConfig load_config(const std::string& path) {
  std::ifstream is(path);
  if (!is) bad("cannot open '" + path + "'");
  std::ostringstream buf;
  buf << is.rdbuf();
  return parse_config(buf.str());
}

void validate_config(const RunConfig& c) {
  if (c.scene.empty()) bad("scene must not be empty");
  const bool bare = c.scene == "chassis";
  if (!bare && (c.chassis_x_mm || c.chassis_y_mm || c.cell_mm))
    bad("chassis_x_mm / chassis_y_mm / cell_mm overrides apply only to the "
        "chassis scene (element layouts are calibrated to the default plate)");
  for (const auto* p : {&c.chassis_x_mm, &c.chassis_y_mm, &c.cell_mm})
    if (*p && **p <= 0.0) bad("plate dimensions and cell size must be positive");
  if (c.slot && (c.slot->length_mm <= 0.0 || c.slot->width_mm <= 0.0))
    bad("slot length and width must be positive");
  if (c.z0_ohm && *c.z0_ohm <= 0.0) bad("z0_ohm must be positive");
  if (c.freq_step_GHz <= 0.0) bad("freq_step_GHz must be positive");
  if (c.freq_start_GHz <= 0.0) bad("freq_start_GHz must be positive");
  if (c.freq_stop_GHz < c.freq_start_GHz)
    bad("freq_stop_GHz must be >= freq_start_GHz");
  if (c.n_modes < 1) bad("n_modes must be at least 1");
  if (!(c.significance_threshold > 0.0 && c.significance_threshold <= 1.0))
    bad("significance_threshold must be in (0, 1]");
  if (!(c.null_threshold > 0.0 && c.null_threshold < 1.0))
    bad("null_threshold must be in (0, 1)");
  if (!(c.window_area_fraction > 0.0 && c.window_area_fraction <= 1.0))
    bad("window_area_fraction must be in (0, 1]");
  if (!(c.min_correlation >= 0.0 && c.min_correlation < 1.0))
    bad("min_correlation must be in [0, 1)");
  if (c.reflection_threshold_db >= 0.0)
    bad("reflection_threshold_db must be negative");
  if (c.band_hi_GHz < c.band_lo_GHz) bad("band_hi_GHz must be >= band_lo_GHz");
  if (c.band_lo_GHz <= 0.0) bad("band_lo_GHz must be positive");
}

std::string serialize_config(const RunConfig& c) {
  std::ostringstream os;
  os << "scene = " << c.scene << "\n";
  if (c.chassis_x_mm) os << "chassis_x_mm = " << num(*c.chassis_x_mm) << "\n";
  if (c.chassis_y_mm) os << "chassis_y_mm = " << num(*c.chassis_y_mm) << "\n";
  if (c.cell_mm) os << "cell_mm = " << num(*c.cell_mm) << "\n";
  if (c.slot)
    os << "slot = " << num(c.slot->center_x_mm) << " "
       << num(c.slot->center_y_mm) << " " << num(c.slot->length_mm) << " "
       << num(c.slot->width_mm) << "\n";
  if (c.z0_ohm) os << "z0_ohm = " << num(*c.z0_ohm) << "\n";
  os << "freq_start_GHz = " << num(c.freq_start_GHz) << "\n";
  os << "freq_stop_GHz = " << num(c.freq_stop_GHz) << "\n";
  os << "freq_step_GHz = " << num(c.freq_step_GHz) << "\n";
  os << "n_modes = " << c.n_modes << "\n";
  os << "significance_threshold = " << num(c.significance_threshold) << "\n";
  os << "null_threshold = " << num(c.null_threshold) << "\n";
  os << "window_area_fraction = " << num(c.window_area_fraction) << "\n";
  os << "min_correlation = " << num(c.min_correlation) << "\n";
  os << "reflection_threshold_db = " << num(c.reflection_threshold_db) << "\n";
  os << "band_lo_GHz = " << num(c.band_lo_GHz) << "\n";
  os << "band_hi_GHz = " << num(c.band_hi_GHz) << "\n";
  os << "out_dir = " << c.out_dir << "\n";
  return os.str();
}

std::string config_hash(const RunConfig& c) {
  const std::string text = serialize_config(c);
  std::uint64_t h = 14695981039346656037ULL;
  for (unsigned char byte : text) {
    h ^= byte;
    h *= 1099511628211ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

SceneSpec config_scene(const RunConfig& c) {
  SceneSpec s = scene_preset(c.scene);
  if (c.chassis_x_mm) s.chassis_x_mm = *c.chassis_x_mm;
  if (c.chassis_y_mm) s.chassis_y_mm = *c.chassis_y_mm;
  if (c.cell_mm) s.cell_mm = *c.cell_mm;
  if (c.slot) s.slot = *c.slot;
  if (c.z0_ohm) s.z0_ohm = *c.z0_ohm;
  return s;
}

std::vector<double> config_grid(const RunConfig& c) {
  const double span = c.freq_stop_GHz - c.freq_start_GHz;
  const int n = 1 + static_cast<int>(std::floor(span / c.freq_step_GHz + 1e-9));
  std::vector<double> f(n);
  for (int k = 0; k < n; ++k) f[k] = c.freq_start_GHz + k * c.freq_step_GHz;
  return f;
}

FreqBand config_band(const RunConfig& c) { return {c.band_lo_GHz, c.band_hi_GHz}; }

AnalysisSettings config_settings(const RunConfig& c) {
  AnalysisSettings a;
  a.significance_threshold = c.significance_threshold;
  a.null_threshold = c.null_threshold;
  a.window_area_fraction = c.window_area_fraction;
  a.min_pairing_corr = c.min_correlation;
  a.reflection_threshold_db = c.reflection_threshold_db;
  return a;
}

}  // namespace tcmom
