#include "tcmom/reports.hpp"

#include <cmath>
#include <cstdio>
#include <sstream>

#include "tcmom/errors.hpp"

namespace tcmom {
namespace {

// Fixed 9-significant-digit formatting keeps artifacts byte-identical for
// identical inputs regardless of stream state or platform defaults.
std::string g9(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.9g", x);
  return buf;
}

double db20(double mag) { return 20.0 * std::log10(mag); }

constexpr double kRadToDeg = 57.29577951308232;

}  // namespace

std::string artifact_header(const std::string& config_hash) {
  std::ostringstream os;
  os << "# config: " << config_hash << "\n";
  os << "# version: " << kArtifactVersion << "\n";
  return os.str();
}

std::string modes_csv(const TrackedModes& tracked, const std::string& header) {
  std::ostringstream os;
  os << header << "freq_GHz,tracked_id,lambda,MS,char_angle_deg\n";
  for (std::size_t s = 0; s < tracked.freq_GHz.size(); ++s)
    for (const TrackedMode& m : tracked.modes)
      os << g9(tracked.freq_GHz[s]) << "," << m.id << "," << g9(m.lambda[s])
         << "," << g9(m.ms[s]) << "," << g9(characteristic_angle(m.lambda[s]))
         << "\n";
  return os.str();
}

std::string sparams_csv(const std::vector<ScatteringMatrix>& sweep,
                        const std::string& header) {
  if (sweep.empty())
    fail(ErrorKind::InvalidInput, "sparams_csv needs at least one sample");
  const std::vector<int>& ids = sweep.front().port_ids;
  std::ostringstream os;
  os << header << "freq_GHz";
  for (int i : ids)
    for (int j : ids)
      os << ",S" << i << j << "_dB,S" << i << j << "_phase_deg";
  os << "\n";
  for (const ScatteringMatrix& sm : sweep) {
    if (sm.port_ids != ids)
      fail(ErrorKind::InvalidInput, "sweep samples disagree on port ids");
    os << g9(sm.freq_GHz);
    for (int r = 0; r < sm.S.rows(); ++r)
      for (int c = 0; c < sm.S.cols(); ++c) {
        const Complex v = sm.S(r, c);
        os << "," << g9(db20(std::abs(v))) << ","
           << g9(std::arg(v) * kRadToDeg);
      }
    os << "\n";
  }
  return os.str();
}

std::string field_file(const TriangleMesh& mesh, const SurfaceCurrent& current,
                       const std::string& header) {
  if (current.vec.size() != static_cast<std::size_t>(mesh.triangle_count()))
    fail(ErrorKind::InvalidInput, "field/mesh triangle count mismatch");
  std::ostringstream os;
  os << "field v1\n" << header;
  os << "# columns: tri cx_mm cy_mm cz_mm jx_re jx_im jy_re jy_im jz_re "
        "jz_im mag_A_per_m\n";
  os << mesh.triangle_count() << "\n";
  for (int t = 0; t < mesh.triangle_count(); ++t) {
    const Vec3 c = mesh.centroid(t);
    os << t << " " << g9(c.x) << " " << g9(c.y) << " " << g9(c.z);
    for (const Complex& j : current.vec[t])
      os << " " << g9(j.real()) << " " << g9(j.imag());
    os << " " << g9(current.mag[t]) << "\n";
  }
  return os.str();
}

std::string null_map_file(const TriangleMesh& mesh,
                          const SurfaceCurrent& current, const NullMap& map,
                          const std::string& header) {
  if (current.vec.size() != static_cast<std::size_t>(mesh.triangle_count()))
    fail(ErrorKind::InvalidInput, "field/mesh triangle count mismatch");
  // The map's normalized values are |J| / max over chassis; recover that
  // scale so the exported vectors are normalized the same way.
  double max_mag = 0.0;
  for (std::size_t k = 0; k < map.chassis_tris.size(); ++k)
    max_mag = std::max(max_mag, current.mag[map.chassis_tris[k]]);
  const double scale = max_mag > 0.0 ? 1.0 / max_mag : 0.0;
  std::ostringstream os;
  os << "field v1\n" << header;
  os << "# columns: tri cx_mm cy_mm cz_mm jx_re jx_im jy_re jy_im jz_re "
        "jz_im mag_norm mask\n";
  os << "# window: fraction " << g9(map.window_fraction) << ", center "
     << (map.center_null ? "null" : "carrying current") << ", max "
     << g9(map.center_current) << "\n";
  os << map.chassis_tris.size() << "\n";
  for (std::size_t k = 0; k < map.chassis_tris.size(); ++k) {
    const int t = map.chassis_tris[k];
    const Vec3 c = mesh.centroid(t);
    os << t << " " << g9(c.x) << " " << g9(c.y) << " " << g9(c.z);
    for (const Complex& j : current.vec[t])
      os << " " << g9(j.real() * scale) << " " << g9(j.imag() * scale);
    os << " " << g9(map.normalized[k]) << " " << int(map.mask[k]) << "\n";
  }
  return os.str();
}

std::string bands_report(const TrackedModes& tracked, double threshold) {
  std::ostringstream os;
  if (tracked.freq_GHz.size() < 2) {
    // Band edges need at least two samples; report significance instead.
    for (const TrackedMode& m : tracked.modes)
      os << "mode " << m.id << ": MS " << g9(m.ms.empty() ? 0.0 : m.ms[0])
         << " at " << g9(tracked.freq_GHz.empty() ? 0.0 : tracked.freq_GHz[0])
         << " GHz (single sample, no band edges)\n";
    return os.str();
  }
  for (std::size_t m = 0; m < tracked.modes.size(); ++m) {
    os << "mode " << tracked.modes[m].id << ": ";
    const auto bands = radiating_band(tracked, static_cast<int>(m), threshold);
    if (bands.empty()) {
      os << "no radiating band (MS < " << g9(threshold) << ")\n";
      continue;
    }
    for (std::size_t b = 0; b < bands.size(); ++b)
      os << (b ? ", " : "") << "[" << g9(bands[b].first) << ", "
         << g9(bands[b].second) << "] GHz";
    os << "\n";
  }
  return os.str();
}

std::string classification_csv(const CouplingReport& report,
                               const std::string& header) {
  std::ostringstream os;
  os << header
     << "tracked_id,class,max_MS_in_band,eval_freq_GHz,center_current,"
        "center_null,rank_at_center,rank_at_start\n";
  for (const ModeEvidence& m : report.modes)
    os << m.tracked_id << "," << mode_class_name(m.cls) << ","
       << g9(m.max_ms_in_band) << "," << g9(m.eval_freq_GHz) << ","
       << g9(m.center_current) << "," << int(m.center_null) << ","
       << m.rank_at_center << "," << m.rank_at_start << "\n";
  return os.str();
}

std::string perturbation_csv(const PerturbationReport& report,
                             const std::string& header) {
  std::ostringstream os;
  os << header
     << "base_id,pert_id,pairing_corr,ms_linf_dev,band_overlap,"
        "base_element_fraction,pert_element_fraction,maxima_relocated\n";
  for (const ModePerturbation& m : report.modes)
    os << m.base_id << "," << m.pert_id << "," << g9(m.pairing_corr) << ","
       << g9(m.ms_linf_dev) << "," << g9(m.band_overlap) << ","
       << g9(m.base_element_fraction) << "," << g9(m.pert_element_fraction)
       << "," << int(m.maxima_relocated) << "\n";
  return os.str();
}

std::string dgs_csv(const DgsRecord& record, const std::string& header) {
  std::ostringstream os;
  os << header << "row,a,b,before,after,delta\n";
  for (const IsolationDelta& d : record.isolation)
    os << "isolation," << d.port_i << "," << d.port_j << ","
       << g9(d.worst_before_db) << "," << g9(d.worst_after_db) << ","
       << g9(d.delta_db) << "\n";
  for (const ReflectionShift& r : record.reflection)
    os << "reflection," << r.port << ",," << g9(band_length(r.bands_before))
       << "," << g9(band_length(r.bands_after)) << "," << g9(r.overlap_ratio)
       << "\n";
  for (const ClassChange& c : record.classification)
    os << "class," << c.base_id << "," << c.pert_id << ","
       << mode_class_name(c.before_cls) << "," << mode_class_name(c.after_cls)
       << ",\n";
  return os.str();
}

std::string compare_report_text(const PerturbationReport& modes,
                                const ModePairing& pairing,
                                const DgsRecord* record) {
  std::ostringstream os;
  os << "mode perturbation (baseline -> perturbed)\n";
  for (const ModePerturbation& m : modes.modes) {
    os << "  mode " << m.base_id;
    if (m.pert_id < 0) {
      os << ": no counterpart above the pairing threshold\n";
      continue;
    }
    os << " -> " << m.pert_id << " (corr " << g9(m.pairing_corr)
       << "): MS deviation " << g9(m.ms_linf_dev) << ", band overlap "
       << g9(m.band_overlap);
    if (m.maxima_relocated) os << ", current maxima relocated to elements";
    os << "\n";
  }
  if (!modes.new_pert_ids.empty()) {
    os << "  new modes without a baseline parent:";
    for (int id : modes.new_pert_ids) os << " " << id;
    os << "\n";
  }
  if (!pairing.lost_base_ids.empty()) {
    os << "  baseline modes lost:";
    for (int id : pairing.lost_base_ids) os << " " << id;
    os << "\n";
  }
  if (record == nullptr) return os.str();
  os << "slot study band [" << g9(record->band.first) << ", "
     << g9(record->band.second) << "] GHz\n";
  for (const IsolationDelta& d : record->isolation)
    os << "  ports " << d.port_i << "-" << d.port_j << ": worst isolation "
       << g9(d.worst_before_db) << " -> " << g9(d.worst_after_db) << " dB ("
       << (d.delta_db >= 0 ? "+" : "") << g9(d.delta_db) << " dB)\n";
  for (const ReflectionShift& r : record->reflection)
    os << "  port " << r.port << ": matching-band overlap "
       << g9(r.overlap_ratio) << "\n";
  for (const ClassChange& c : record->classification)
    os << "  mode " << c.base_id << " -> " << c.pert_id << ": "
       << mode_class_name(c.before_cls) << " -> "
       << mode_class_name(c.after_cls) << "\n";
  return os.str();
}

}  // namespace tcmom
