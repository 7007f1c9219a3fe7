#pragma once

#include <optional>
#include <string>
#include <vector>

#include "tcmom/scene.hpp"

namespace tcmom {

// Version stamp embedded in every generated report; bump on any change that
// alters numerical output.
inline constexpr const char* kArtifactVersion = "1.0.0";

// One reproducible run: scene selection, frequency grid, mode count,
// classification thresholds, and output location. Defaults are the
// canonical study values; a config file only lists deviations from them.
struct RunConfig {
  std::string scene = "chassis";

  // Geometry overrides. Chassis dimensions and cell size may only be
  // overridden for the bare-chassis scene (element layouts are calibrated
  // to the 120 x 60 mm plate at 6 mm cells); a slot or port reference
  // override is legal for any scene.
  std::optional<double> chassis_x_mm, chassis_y_mm, cell_mm;
  std::optional<SlotRect> slot;
  std::optional<double> z0_ohm;

  double freq_start_GHz = 1.8;
  double freq_stop_GHz = 2.8;
  double freq_step_GHz = 0.05;
  int n_modes = 10;

  double significance_threshold = kMsBandThreshold;
  double null_threshold = 0.1;
  double window_area_fraction = 0.05;
  double min_correlation = 0.5;
  double reflection_threshold_db = -10.0;
  double band_lo_GHz = 2.4;
  double band_hi_GHz = 2.8;

  std::string out_dir = "out";

  bool operator==(const RunConfig&) const = default;
};

// Key = value text, `#` comments, unknown keys rejected. Parsing validates
// every invariant (positive step, ordered grid and band, thresholds in
// range) and throws config-error otherwise.
RunConfig parse_config(const std::string& text);
RunConfig load_config(const std::string& path);
void validate_config(const RunConfig& c);

// Canonical serialization: fixed key order, shortest round-trip number
// formatting, omitted unset optionals. parse(serialize(c)) == c.
std::string serialize_config(const RunConfig& c);

// FNV-1a 64-bit hash of the canonical serialization, as 16 hex digits.
// Stable across platforms; stamped into output headers.
std::string config_hash(const RunConfig& c);

// Resolved views.
SceneSpec config_scene(const RunConfig& c);
std::vector<double> config_grid(const RunConfig& c);
FreqBand config_band(const RunConfig& c);
AnalysisSettings config_settings(const RunConfig& c);

}  // namespace tcmom
