#include "tcmom/scene.hpp"

#include <algorithm>
#include <cmath>

#include "tcmom/errors.hpp"

namespace tcmom {
namespace {

// Loop-element family shared by every preset: a U-shaped strip one cell
// (6 mm) wide whose two legs reach `kLegExtent` outward from a short edge,
// joined by a crossbar in the outermost column. Both leg ends weld into the
// chassis edge; the delta gap sits on the feed-leg junction, the other
// junction is the short. Leg rows are `kLegSpacing` apart so two elements
// fit one 60 mm edge with a free row between them. The extent is tuned so
// the element-chassis hybrid resonates near the low edge of the swept band
// and the transverse chassis mode hybridizes strongly in a four-element
// layout; the port reference impedance matches the junction feed's real
// impedance crossing (~450 ohm near 1.6 GHz).
constexpr double kLegExtent = 36.0;   // outward reach, mm
constexpr double kLegSpacing = 18.0;  // feed-leg to short-leg row pitch, mm
constexpr double kPresetZ0 = 450.0;   // calibrated port reference, ohm

// `edge_x` is 0 or chassis_x; `dir` -1 for the left edge, +1 for the right.
// `y_feed`/`y_short` are leg centerlines (cell centers).
LoopElementSpec u_loop(double edge_x, double dir, double y_feed,
                       double y_short) {
  LoopElementSpec e;
  const double far_x = edge_x + dir * (kLegExtent - 3.0);
  e.path_mm = {{edge_x, y_feed},
               {far_x, y_feed},
               {far_x, y_short},
               {edge_x, y_short}};
  e.width_mm = 6.0;
  e.feed_segment = 0;
  e.feed_offset_mm = 0.0;  // gap on the chassis junction itself
  e.has_short = true;
  return e;
}

void add_left_pair(SceneSpec& s) {
  s.elements.push_back({1, u_loop(0.0, -1.0, 3.0, 21.0)});
  s.elements.push_back({2, u_loop(0.0, -1.0, 57.0, 39.0)});
}

void add_right_pair(SceneSpec& s) {
  s.elements.push_back({3, u_loop(s.chassis_x_mm, 1.0, 3.0, 21.0)});
  s.elements.push_back({4, u_loop(s.chassis_x_mm, 1.0, 57.0, 39.0)});
}

SlotRect central_slot() {
  // Transverse slot on the chassis centerline: two cells long along x,
  // spanning the middle 48 mm of the width so only one-cell bridges remain
  // at the rims. Extents are multiples of two cells so the snapped cut
  // stays mirror-symmetric.
  return SlotRect{60.0, 30.0, 12.0, 48.0};
}

bool same_elements(const SceneSpec& a, const SceneSpec& b) {
  if (a.elements.size() != b.elements.size()) return false;
  for (size_t i = 0; i < a.elements.size(); ++i) {
    const auto& [pa, ea] = a.elements[i];
    const auto& [pb, eb] = b.elements[i];
    if (pa != pb || ea.path_mm != eb.path_mm || ea.width_mm != eb.width_mm ||
        ea.feed_segment != eb.feed_segment ||
        ea.feed_offset_mm != eb.feed_offset_mm)
      return false;
  }
  return true;
}

}  // namespace

SceneSpec scene_preset(const std::string& name) {
  SceneSpec s;
  s.name = name;
  if (name == "chassis") return s;
  s.z0_ohm = kPresetZ0;
  if (name == "mimo1") {
    s.elements.push_back({1, u_loop(0.0, -1.0, 3.0, 21.0)});
    return s;
  }
  if (name == "mimo2-short-edge") {
    add_left_pair(s);
    return s;
  }
  if (name == "mimo4") {
    add_left_pair(s);
    add_right_pair(s);
    return s;
  }
  if (name == "mimo4-dgs") {
    add_left_pair(s);
    add_right_pair(s);
    s.slot = central_slot();
    return s;
  }
  fail(ErrorKind::ConfigError, "unknown scene preset '" + name + "'");
}

std::vector<std::string> scene_preset_names() {
  return {"chassis", "mimo1", "mimo2-short-edge", "mimo4", "mimo4-dgs"};
}

TriangleMesh build_scene(const SceneSpec& spec) {
  if (spec.chassis_x_mm <= 0 || spec.chassis_y_mm <= 0 || spec.cell_mm <= 0)
    fail(ErrorKind::InvalidGeometry, "chassis dimensions must be positive");
  TriangleMesh mesh =
      build_rect_plate(spec.chassis_x_mm, spec.chassis_y_mm, spec.cell_mm);
  if (spec.slot) mesh = cut_rect_slot(mesh, *spec.slot);
  for (const auto& [port_id, element] : spec.elements)
    mesh = add_strip_loop(mesh, element, port_id, spec.cell_mm);
  validate_mesh(mesh);
  return mesh;
}

Scene make_scene(const SceneSpec& spec) {
  Scene sc;
  sc.spec = spec;
  sc.mesh = build_scene(spec);
  sc.basis = extract_rwg(sc.mesh);
  sc.ports = make_ports(sc.basis, spec.z0_ohm);
  std::sort(sc.ports.begin(), sc.ports.end(),
            [](const PortSpec& a, const PortSpec& b) {
              return a.port_id < b.port_id;
            });
  return sc;
}

Scene make_scene(const std::string& preset) {
  return make_scene(scene_preset(preset));
}

SceneSweep sweep_scene(const Scene& scene, const std::vector<double>& freq_GHz,
                       int n_modes) {
  if (freq_GHz.empty())
    fail(ErrorKind::InvalidInput, "empty frequency grid");
  SceneSweep out;
  out.freq_GHz = freq_GHz;
  for (double f : freq_GHz) {
    const ImpedanceMatrix zm = assemble_impedance(scene.basis, f);
    if (!scene.ports.empty())
      out.s.push_back(scattering_matrix(zm, scene.ports));
    const ReactanceSplit rx = split_reactance(zm);
    out.modes.push_back(solve_modes(rx.R, rx.X, n_modes, f));
  }
  out.tracked = track_modes(out.modes);
  return out;
}

DgsStudy dgs_effect(const SceneSpec& without_slot, const SceneSpec& with_slot,
                    FreqBand band, const std::vector<double>& freq_GHz,
                    int n_modes, const AnalysisSettings& settings) {
  if (without_slot.slot)
    fail(ErrorKind::InvalidInput, "baseline scene already has a slot");
  if (!with_slot.slot)
    fail(ErrorKind::InvalidInput, "slotted scene is missing its slot");
  if (without_slot.chassis_x_mm != with_slot.chassis_x_mm ||
      without_slot.chassis_y_mm != with_slot.chassis_y_mm ||
      without_slot.cell_mm != with_slot.cell_mm ||
      without_slot.z0_ohm != with_slot.z0_ohm ||
      !same_elements(without_slot, with_slot))
    fail(ErrorKind::InvalidInput,
         "scenes must differ only by the ground slot");
  if (without_slot.elements.empty())
    fail(ErrorKind::InvalidInput, "slot study needs at least one port");

  DgsStudy st;
  const Scene a = make_scene(without_slot);
  const Scene b = make_scene(with_slot);
  st.before = sweep_scene(a, freq_GHz, n_modes);
  st.after = sweep_scene(b, freq_GHz, n_modes);
  st.cls_before = classify_coupling_modes(
      st.before.modes, st.before.tracked, a.basis, band,
      settings.significance_threshold, settings.null_threshold,
      settings.window_area_fraction);
  st.cls_after = classify_coupling_modes(
      st.after.modes, st.after.tracked, b.basis, band,
      settings.significance_threshold, settings.null_threshold,
      settings.window_area_fraction);
  st.pairing = pair_modes_by_chassis(st.before.modes, st.before.tracked,
                                     a.basis, st.after.modes, st.after.tracked,
                                     b.basis, settings.min_pairing_corr);
  st.modes = perturbation_report(st.before.modes, st.before.tracked, a.basis,
                                 st.after.modes, st.after.tracked, b.basis,
                                 st.pairing, settings.significance_threshold);
  st.record =
      dgs_compare(st.before.s, st.after.s, band, &st.cls_before, &st.cls_after,
                  &st.pairing, settings.reflection_threshold_db);
  return st;
}

DgsStudy dgs_effect(const std::string& preset_without,
                    const std::string& preset_with, FreqBand band,
                    const std::vector<double>& freq_GHz, int n_modes,
                    const AnalysisSettings& settings) {
  return dgs_effect(scene_preset(preset_without), scene_preset(preset_with),
                    band, freq_GHz, n_modes, settings);
}

}  // namespace tcmom
