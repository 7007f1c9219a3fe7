#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "tcmom/analysis.hpp"
#include "tcmom/cma.hpp"
#include "tcmom/geometry.hpp"
#include "tcmom/mom.hpp"
#include "tcmom/rwg.hpp"

namespace tcmom {

// A complete simulation scene: rectangular chassis plate, an optional
// ground slot cut from it, and U-shaped loop elements welded onto the
// short edges, each carrying one delta-gap port.
struct SceneSpec {
  std::string name = "custom";
  double chassis_x_mm = 120.0;
  double chassis_y_mm = 60.0;
  double cell_mm = 6.0;
  std::optional<SlotRect> slot;  // cut before elements are welded
  std::vector<std::pair<int, LoopElementSpec>> elements;  // (port id, strip)
  double z0_ohm = 50.0;
};

// Canonical presets; unknown names raise config-error.
//   chassis          bare 120 x 60 plate
//   mimo1            one loop element on the left short edge
//   mimo2-short-edge two elements sharing the left short edge
//   mimo4            two elements per short edge
//   mimo4-dgs        mimo4 plus a central ground slot
SceneSpec scene_preset(const std::string& name);
std::vector<std::string> scene_preset_names();

TriangleMesh build_scene(const SceneSpec& spec);

// Mesh, basis and ports bundled, since most operations need all three.
struct Scene {
  SceneSpec spec;
  TriangleMesh mesh;
  RwgBasisSet basis;
  std::vector<PortSpec> ports;  // ascending port-id order
};
Scene make_scene(const SceneSpec& spec);
Scene make_scene(const std::string& preset);

// One pass over a frequency grid with a single assembly per sample:
// S-parameters (when the scene has ports) plus tracked characteristic modes.
struct SceneSweep {
  std::vector<double> freq_GHz;
  std::vector<ScatteringMatrix> s;  // empty for portless scenes
  std::vector<ModeSet> modes;
  TrackedModes tracked;
};
SceneSweep sweep_scene(const Scene& scene, const std::vector<double>& freq_GHz,
                       int n_modes = 6);

// Classification and comparison knobs, bundled so a run configuration can
// carry them around as one value. Defaults match the analysis module.
struct AnalysisSettings {
  double significance_threshold = kMsBandThreshold;
  double null_threshold = 0.1;
  double window_area_fraction = 0.10;
  double min_pairing_corr = 0.5;
  double reflection_threshold_db = -10.0;
};

// Slot study: sweep both variants (which must differ only by the slot),
// classify coupling modes, pair them across the cut, and compare
// S-parameters inside the band.
struct DgsStudy {
  SceneSweep before, after;
  CouplingReport cls_before, cls_after;
  ModePairing pairing;
  PerturbationReport modes;
  DgsRecord record;
};
DgsStudy dgs_effect(const SceneSpec& without_slot, const SceneSpec& with_slot,
                    FreqBand band, const std::vector<double>& freq_GHz,
                    int n_modes = 6, const AnalysisSettings& settings = {});
DgsStudy dgs_effect(const std::string& preset_without,
                    const std::string& preset_with, FreqBand band,
                    const std::vector<double>& freq_GHz, int n_modes = 6,
                    const AnalysisSettings& settings = {});

}  // namespace tcmom
