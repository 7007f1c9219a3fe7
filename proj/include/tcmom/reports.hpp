#pragma once

#include <string>
#include <vector>

#include "tcmom/analysis.hpp"
#include "tcmom/config.hpp"
#include "tcmom/scene.hpp"

namespace tcmom {

// `# key: value` comment lines stamped into every text artifact so any
// output file can be traced back to the exact configuration that made it.
std::string artifact_header(const std::string& config_hash);

// `freq_GHz,tracked_id,lambda,MS,char_angle_deg`, one row per (sample,
// tracked mode); gaps in a track appear as nan rows.
std::string modes_csv(const TrackedModes& tracked, const std::string& header);

// `freq_GHz,S11_dB,S11_phase_deg,...`, port pairs row-major.
std::string sparams_csv(const std::vector<ScatteringMatrix>& sweep,
                        const std::string& header);

// Plain-text field file: `field v1` magic, comment header, triangle count,
// then one row per triangle `tri cx cy cz jx_re jx_im jy_re jy_im jz_re
// jz_im mag` (positions mm, currents A/m at the centroid).
std::string field_file(const TriangleMesh& mesh, const SurfaceCurrent& current,
                       const std::string& header);

// Null map: the same field format restricted to chassis triangles, current
// normalized by the chassis maximum, plus a trailing mask column (1 = below
// the null threshold).
std::string null_map_file(const TriangleMesh& mesh,
                          const SurfaceCurrent& current, const NullMap& map,
                          const std::string& header);

// Human-readable per-mode radiating bands (printed by the modes command).
std::string bands_report(const TrackedModes& tracked, double threshold);

// Coupling classification, one row per tracked mode.
std::string classification_csv(const CouplingReport& report,
                               const std::string& header);

// Baseline-vs-perturbed mode rows (deviation, band overlap, relocation).
std::string perturbation_csv(const PerturbationReport& report,
                             const std::string& header);

// Isolation / reflection / class-change rows of a slot study.
std::string dgs_csv(const DgsRecord& record, const std::string& header);

// Human-readable comparison summary (printed and written by compare).
std::string compare_report_text(const PerturbationReport& modes,
                                const ModePairing& pairing,
                                const DgsRecord* record);

}  // namespace tcmom
