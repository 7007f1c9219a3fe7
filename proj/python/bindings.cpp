// Python bindings for the main operations: scene meshing, impedance
// assembly, characteristic-mode solves and sweeps, coupling
// classification, and the slot (DGS) study. Results come back as plain
// dicts of numpy arrays / scalars so downstream analysis stays in Python.

#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "tcmom/analysis.hpp"
#include "tcmom/cma.hpp"
#include "tcmom/config.hpp"
#include "tcmom/errors.hpp"
#include "tcmom/geometry.hpp"
#include "tcmom/mesh_io.hpp"
#include "tcmom/mom.hpp"
#include "tcmom/reports.hpp"
#include "tcmom/rwg.hpp"
#include "tcmom/scene.hpp"

namespace py = pybind11;
using namespace tcmom;

namespace {

Scene scene_from_name(const std::string& preset) { return make_scene(preset); }

py::dict stats_dict(const TriangleMesh& mesh) {
  const MeshStats st = census(mesh);
  py::dict d;
  d["vertices"] = st.vertices;
  d["triangles"] = st.triangles;
  d["edges"] = st.edges;
  d["interior_edges"] = st.interior_edges;
  d["boundary_edges"] = st.boundary_edges;
  d["holes"] = st.holes;
  d["ports"] = mesh.port_count();
  return d;
}

py::dict tracked_dict(const TrackedModes& tracked) {
  py::dict d;
  d["freq_GHz"] = tracked.freq_GHz;
  py::list modes;
  for (const TrackedMode& m : tracked.modes) {
    py::dict row;
    row["id"] = m.id;
    row["lambda"] = m.lambda;
    row["ms"] = m.ms;
    row["link_corr"] = m.link_corr;
    modes.append(row);
  }
  d["modes"] = modes;
  return d;
}

py::dict sweep_dict(const SceneSweep& sweep) {
  py::dict d;
  d["freq_GHz"] = sweep.freq_GHz;
  py::list lam, ms;
  for (const ModeSet& m : sweep.modes) {
    lam.append(Eigen::VectorXd(m.lambda));
    ms.append(Eigen::VectorXd(m.ms));
  }
  d["lambda"] = lam;
  d["ms"] = ms;
  d["tracked"] = tracked_dict(sweep.tracked);
  if (!sweep.s.empty()) {
    py::list s_list;
    for (const ScatteringMatrix& sm : sweep.s)
      s_list.append(Eigen::MatrixXcd(sm.S));
    d["S"] = s_list;
    d["port_ids"] = sweep.s.front().port_ids;
  }
  return d;
}

py::dict evidence_dict(const ModeEvidence& m) {
  py::dict row;
  row["tracked_id"] = m.tracked_id;
  row["cls"] = std::string(mode_class_name(m.cls));
  row["max_ms_in_band"] = m.max_ms_in_band;
  row["eval_freq_GHz"] = m.eval_freq_GHz;
  row["center_current"] = m.center_current;
  row["center_null"] = m.center_null;
  row["rank_at_center"] = m.rank_at_center;
  row["rank_at_start"] = m.rank_at_start;
  return row;
}

AnalysisSettings settings_from_kwargs(double significance, double null_thr,
                                      double window, double min_corr,
                                      double reflection_db) {
  AnalysisSettings st;
  st.significance_threshold = significance;
  st.null_threshold = null_thr;
  st.window_area_fraction = window;
  st.min_pairing_corr = min_corr;
  st.reflection_threshold_db = reflection_db;
  return st;
}

}  // namespace

PYBIND11_MODULE(_tcmom, m) {
  m.doc() =
      "Method-of-moments characteristic-mode toolkit: plate scenes, modal "
      "sweeps, coupling classification, slot isolation studies";

  py::register_exception<Error>(m, "TcmError");

  m.def("preset_names", &scene_preset_names,
        "Names of the canonical scene presets");

  m.def(
      "mesh_stats",
      [](const std::string& preset) {
        return stats_dict(scene_from_name(preset).mesh);
      },
      py::arg("preset"), "Vertex/triangle/edge census of a preset scene");

  m.def(
      "mesh_text",
      [](const std::string& preset) {
        return mesh_to_string(scene_from_name(preset).mesh);
      },
      py::arg("preset"), "Plain-text mesh file contents for a preset scene");

  m.def(
      "impedance",
      [](const std::string& preset, double freq_GHz) {
        const Scene sc = scene_from_name(preset);
        return Eigen::MatrixXcd(assemble_impedance(sc.basis, freq_GHz).Z);
      },
      py::arg("preset"), py::arg("freq_GHz"),
      "Dense EFIE impedance matrix of a preset scene at one frequency");

  m.def(
      "modes_at",
      [](const std::string& preset, double freq_GHz, int n_modes) {
        const Scene sc = scene_from_name(preset);
        const ImpedanceMatrix zm = assemble_impedance(sc.basis, freq_GHz);
        const ReactanceSplit rx = split_reactance(zm);
        const ModeSet ms = solve_modes(rx.R, rx.X, n_modes, freq_GHz);
        py::dict d;
        d["freq_GHz"] = freq_GHz;
        d["lambda"] = Eigen::VectorXd(ms.lambda);
        d["ms"] = Eigen::VectorXd(ms.ms);
        d["J"] = Eigen::MatrixXd(ms.J);
        d["ortho_err"] = ms.diag.max_ortho_err;
        d["eig_residual"] = ms.diag.max_eig_residual;
        return d;
      },
      py::arg("preset"), py::arg("freq_GHz"), py::arg("n_modes") = 6,
      "Characteristic modes of a preset scene at one frequency");

  m.def(
      "sweep",
      [](const std::string& preset, const std::vector<double>& freq_GHz,
         int n_modes) {
        const Scene sc = scene_from_name(preset);
        return sweep_dict(sweep_scene(sc, freq_GHz, n_modes));
      },
      py::arg("preset"), py::arg("freq_GHz"), py::arg("n_modes") = 6,
      "Tracked-mode and S-parameter sweep of a preset scene");

  m.def(
      "classify",
      [](const std::string& preset, const std::vector<double>& freq_GHz,
         double band_lo, double band_hi, int n_modes, double significance,
         double null_threshold, double window_area_fraction) {
        const Scene sc = scene_from_name(preset);
        const SceneSweep sw = sweep_scene(sc, freq_GHz, n_modes);
        const CouplingReport rep = classify_coupling_modes(
            sw.modes, sw.tracked, sc.basis, {band_lo, band_hi}, significance,
            null_threshold, window_area_fraction);
        py::list rows;
        for (const ModeEvidence& ev : rep.modes) rows.append(evidence_dict(ev));
        return rows;
      },
      py::arg("preset"), py::arg("freq_GHz"), py::arg("band_lo"),
      py::arg("band_hi"), py::arg("n_modes") = 6,
      py::arg("significance") = kMsBandThreshold,
      py::arg("null_threshold") = 0.1, py::arg("window_area_fraction") = 0.10,
      "Coupling / non-coupling classification of tracked modes in a band");

  m.def(
      "dgs_study",
      [](const std::string& preset_without, const std::string& preset_with,
         const std::vector<double>& freq_GHz, double band_lo, double band_hi,
         int n_modes, double significance, double null_threshold,
         double window, double min_corr, double reflection_db) {
        const DgsStudy st = dgs_effect(
            preset_without, preset_with, {band_lo, band_hi}, freq_GHz, n_modes,
            settings_from_kwargs(significance, null_threshold, window,
                                 min_corr, reflection_db));
        py::dict d;
        py::list iso;
        for (const IsolationDelta& x : st.record.isolation) {
          py::dict row;
          row["port_i"] = x.port_i;
          row["port_j"] = x.port_j;
          row["worst_before_db"] = x.worst_before_db;
          row["worst_after_db"] = x.worst_after_db;
          row["delta_db"] = x.delta_db;
          iso.append(row);
        }
        d["isolation"] = iso;
        py::list refl;
        for (const ReflectionShift& x : st.record.reflection) {
          py::dict row;
          row["port"] = x.port;
          row["overlap_ratio"] = x.overlap_ratio;
          refl.append(row);
        }
        d["reflection"] = refl;
        py::list cls;
        for (const ClassChange& x : st.record.classification) {
          py::dict row;
          row["base_id"] = x.base_id;
          row["pert_id"] = x.pert_id;
          row["before"] = std::string(mode_class_name(x.before_cls));
          row["after"] = std::string(mode_class_name(x.after_cls));
          cls.append(row);
        }
        d["classification"] = cls;
        py::list before_rows, after_rows;
        for (const ModeEvidence& ev : st.cls_before.modes)
          before_rows.append(evidence_dict(ev));
        for (const ModeEvidence& ev : st.cls_after.modes)
          after_rows.append(evidence_dict(ev));
        d["cls_before"] = before_rows;
        d["cls_after"] = after_rows;
        return d;
      },
      py::arg("preset_without"), py::arg("preset_with"), py::arg("freq_GHz"),
      py::arg("band_lo"), py::arg("band_hi"), py::arg("n_modes") = 6,
      py::arg("significance") = kMsBandThreshold,
      py::arg("null_threshold") = 0.1, py::arg("window_area_fraction") = 0.10,
      py::arg("min_correlation") = 0.5,
      py::arg("reflection_threshold_db") = -10.0,
      "Slot study: isolation deltas, reflection-band overlap, mode classes");

  m.def("modal_significance", &modal_significance, py::arg("lambda_"));
  m.def("characteristic_angle", &characteristic_angle, py::arg("lambda_"));
  m.def(
      "config_hash_of",
      [](const std::string& text) { return config_hash(parse_config(text)); },
      py::arg("config_text"),
      "Canonical hash of a run-configuration text (as stamped in artifacts)");

  m.attr("MS_BAND_THRESHOLD") = kMsBandThreshold;
  m.attr("ARTIFACT_VERSION") = kArtifactVersion;
}
