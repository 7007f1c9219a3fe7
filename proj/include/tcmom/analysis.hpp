#pragma once

#include <vector>

#include "tcmom/cma.hpp"
#include "tcmom/mom.hpp"
#include "tcmom/rwg.hpp"

namespace tcmom {

// 20 log10 |S_ij| between two distinct port ids; more negative = better
// isolated. i = j is a reflection, not an isolation, and is rejected.
double isolation_db(const ScatteringMatrix& s, int port_i, int port_j);

// 20 log10 |S_ii| for one port id (used for matching-band logic).
double reflection_db(const ScatteringMatrix& s, int port_i);

// Per-chassis-triangle normalized current with a null mask. Normalization
// runs over chassis triangles only, so element currents cannot mask chassis
// structure. The "center" verdict looks at a window of the given area
// fraction centered on the chassis bounding box.
struct NullMap {
  std::vector<int> chassis_tris;   // mesh triangle indices, ascending
  std::vector<double> normalized;  // |J| / max over chassis, aligned
  std::vector<char> mask;          // 1 where normalized < threshold
  std::vector<int> window_tris;    // chassis triangles inside the window
  double threshold = 0.1;
  double window_fraction = 0.1;
  double center_current = 0.0;     // max normalized value in the window
  bool center_null = false;        // every window triangle masked
};

NullMap current_null_map(const TriangleMesh& mesh,
                         const std::vector<double>& tri_current_mag,
                         double null_threshold = 0.1,
                         double window_area_fraction = 0.10);

enum class ModeClass { Coupling, NonCoupling, Insignificant };
const char* mode_class_name(ModeClass c);

// Evidence row for one tracked mode. Because the literature labels modes
// ambiguously (by order at the band center or at the sweep start), both
// significance ranks are carried alongside the tracked id.
struct ModeEvidence {
  int tracked_id = 0;
  ModeClass cls = ModeClass::Insignificant;
  double max_ms_in_band = 0.0;
  double eval_freq_GHz = 0.0;    // sample whose eigencurrent was inspected
  double center_current = 0.0;   // max normalized chassis current in window
  bool center_null = false;
  int rank_at_center = 0;        // MS rank at the band-center sample, 0 = absent
  int rank_at_start = 0;         // MS rank at the first sweep sample
};

struct CouplingReport {
  FreqBand band{0.0, 0.0};
  double significance_threshold = kMsBandThreshold;
  double null_threshold = 0.1;
  double window_area_fraction = 0.10;
  std::vector<ModeEvidence> modes;  // tracked-id order
};

// Insignificant when max MS in band < the significance threshold; otherwise
// coupling exactly when the chassis-center window carries current at or
// above the null threshold (i.e. no center null).
CouplingReport classify_coupling_modes(const std::vector<ModeSet>& sweep,
                                       const TrackedModes& tracked,
                                       const RwgBasisSet& basis, FreqBand band,
                                       double significance_threshold =
                                           kMsBandThreshold,
                                       double null_threshold = 0.1,
                                       double window_area_fraction = 0.10);

// Pairing of tracked modes across two scenes by eigencurrent correlation
// restricted to chassis-region basis functions shared by both meshes
// (matched geometrically by edge endpoints). Correlation is the normalized
// inner product of the restricted eigencurrents at the baseline mode's
// peak-significance sample.
struct ModePairing {
  struct Link {
    int base_id = 0;
    int pert_id = 0;
    double corr = 0.0;
  };
  std::vector<Link> links;         // accepted pairs, baseline-id order
  std::vector<int> lost_base_ids;  // baseline modes without a counterpart
  std::vector<int> new_pert_ids;   // perturbed modes without a parent
};

ModePairing pair_modes_by_chassis(
    const std::vector<ModeSet>& base_sweep, const TrackedModes& base_tracked,
    const RwgBasisSet& base_basis, const std::vector<ModeSet>& pert_sweep,
    const TrackedModes& pert_tracked, const RwgBasisSet& pert_basis,
    double min_corr = 0.5);

struct ModePerturbation {
  int base_id = 0;
  int pert_id = -1;  // -1 when the baseline mode has no counterpart
  double pairing_corr = 0.0;
  std::vector<FreqBand> base_bands;  // radiating bands of the baseline mode
  std::vector<FreqBand> pert_bands;
  double band_overlap = 1.0;   // |base ∩ pert| / |base|, in [0, 1]
  double ms_linf_dev = 0.0;    // max_f |MS_base - MS_pert| (absent = 0)
  double base_element_fraction = 0.0;  // top-decile current on element regions
  double pert_element_fraction = 0.0;
  bool maxima_relocated = false;  // pert fraction exceeds base by >= 0.5
};

struct PerturbationReport {
  std::vector<double> freq_GHz;
  std::vector<ModePerturbation> modes;  // baseline-id order
  std::vector<int> new_pert_ids;
};

PerturbationReport perturbation_report(
    const std::vector<ModeSet>& base_sweep, const TrackedModes& base_tracked,
    const RwgBasisSet& base_basis, const std::vector<ModeSet>& pert_sweep,
    const TrackedModes& pert_tracked, const RwgBasisSet& pert_basis,
    const ModePairing& pairing, double ms_threshold = kMsBandThreshold);

// In-band S-parameter comparison between a scene and its slotted variant.
struct IsolationDelta {
  int port_i = 0, port_j = 0;
  double worst_before_db = 0.0;  // least-negative in-band isolation
  double worst_after_db = 0.0;
  double delta_db = 0.0;  // before - after; positive = improved
};

struct ReflectionShift {
  int port = 0;
  std::vector<FreqBand> bands_before;  // |S_ii| <= threshold regions
  std::vector<FreqBand> bands_after;
  double overlap_ratio = 1.0;  // |before ∩ after| / |before|
};

struct ClassChange {
  int base_id = 0, pert_id = 0;
  ModeClass before_cls = ModeClass::Insignificant;
  ModeClass after_cls = ModeClass::Insignificant;
};

struct DgsRecord {
  FreqBand band{0.0, 0.0};
  double reflection_threshold_db = -10.0;
  std::vector<IsolationDelta> isolation;   // every unordered port pair
  std::vector<ReflectionShift> reflection; // every port
  std::vector<ClassChange> classification; // per paired tracked mode
};

// Pure comparison over precomputed sweeps; the classification block is
// filled only when both coupling reports and a pairing are supplied.
DgsRecord dgs_compare(const std::vector<ScatteringMatrix>& before,
                      const std::vector<ScatteringMatrix>& after,
                      FreqBand band,
                      const CouplingReport* cls_before = nullptr,
                      const CouplingReport* cls_after = nullptr,
                      const ModePairing* pairing = nullptr,
                      double reflection_threshold_db = -10.0);

// Total length of a band list / length of the pairwise intersection.
double band_length(const std::vector<FreqBand>& bands);
double band_overlap_length(const std::vector<FreqBand>& a,
                           const std::vector<FreqBand>& b);

}  // namespace tcmom
