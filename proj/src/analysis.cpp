#include "tcmom/analysis.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>
#include <string>
#include <utility>

#include "tcmom/errors.hpp"

namespace tcmom {
namespace {

double db20(const Complex& v) {
  return 20.0 * std::log10(std::max(std::abs(v), 1e-300));
}

int port_index(const ScatteringMatrix& s, int port_id) {
  for (int i = 0; i < static_cast<int>(s.port_ids.size()); ++i)
    if (s.port_ids[i] == port_id) return i;
  fail(ErrorKind::InvalidPort,
       "port id " + std::to_string(port_id) + " not in scattering matrix");
}

// Nearest-rank 90th percentile; the top decile is everything >= this value.
double top_decile_floor(std::vector<double> mags) {
  std::sort(mags.begin(), mags.end());
  const int n = static_cast<int>(mags.size());
  const int rank = std::max(1, static_cast<int>(std::ceil(0.9 * n)));
  return mags[std::min(rank, n) - 1];
}

// Fraction of top-decile-current triangles lying on element regions
// (any tag other than the chassis tag).
double element_fraction(const TriangleMesh& mesh,
                        const std::vector<double>& mags) {
  const double floor = top_decile_floor(mags);
  int top = 0, on_element = 0;
  for (int t = 0; t < mesh.triangle_count(); ++t) {
    if (!(mags[t] >= floor) || !(mags[t] > 0.0)) continue;
    ++top;
    if (mesh.triangles[t].tag != kRegionChassis) ++on_element;
  }
  return top > 0 ? static_cast<double>(on_element) / top : 0.0;
}

void check_sweep_pair(const std::vector<ModeSet>& sweep,
                      const TrackedModes& tracked, const RwgBasisSet& basis) {
  if (sweep.empty()) fail(ErrorKind::InvalidInput, "empty mode sweep");
  if (sweep.size() != tracked.freq_GHz.size())
    fail(ErrorKind::InvalidInput,
         "tracked grid does not match the mode sweep length");
  for (const ModeSet& ms : sweep)
    if (ms.J.rows() != basis.size())
      fail(ErrorKind::InvalidInput,
           "mode sweep size does not match the basis set");
}

void check_band_in_grid(const std::vector<double>& grid, FreqBand band) {
  if (!(band.first <= band.second))
    fail(ErrorKind::InvalidInput, "band must satisfy first <= second");
  const double tol = 1e-9;
  if (band.first < grid.front() - tol || band.second > grid.back() + tol)
    fail(ErrorKind::InvalidInput, "band outside the sweep frequency range");
}

std::vector<int> in_band_samples(const std::vector<double>& grid,
                                 FreqBand band) {
  std::vector<int> idx;
  const double tol = 1e-12;
  for (int s = 0; s < static_cast<int>(grid.size()); ++s)
    if (grid[s] >= band.first - tol && grid[s] <= band.second + tol)
      idx.push_back(s);
  if (idx.empty())
    fail(ErrorKind::InvalidInput, "band contains no sweep samples");
  return idx;
}

int nearest_sample(const std::vector<double>& grid, const std::vector<int>& idx,
                   double f) {
  int best = idx.front();
  for (int s : idx)
    if (std::abs(grid[s] - f) < std::abs(grid[best] - f)) best = s;
  return best;
}

// Significance ranks at one sample: 1-based, MS descending, ties by id.
// Absent modes get rank 0.
std::vector<int> ranks_at_sample(const TrackedModes& tracked, int s) {
  std::vector<std::pair<double, int>> present;  // (-ms, id)
  for (const TrackedMode& t : tracked.modes)
    if (t.raw_index[s] >= 0 && std::isfinite(t.ms[s]))
      present.push_back({-t.ms[s], t.id});
  std::sort(present.begin(), present.end());
  std::vector<int> rank(tracked.modes.size(), 0);
  for (int r = 0; r < static_cast<int>(present.size()); ++r)
    for (int m = 0; m < static_cast<int>(tracked.modes.size()); ++m)
      if (tracked.modes[m].id == present[r].second) rank[m] = r + 1;
  return rank;
}

// Geometric edge identity: both endpoint coordinates, lexicographically
// ordered so the key is independent of vertex numbering.
using EdgeKey = std::array<double, 6>;

struct ChassisEntry {
  int index = -1;     // basis index
  double sign = 1.0;  // canonical orientation factor
};

// Chassis bases keyed by edge geometry. `sign` makes the plus/minus triangle
// choice canonical (toward the lexicographically larger centroid), so
// coefficients compare across meshes with different triangle numbering.
std::map<EdgeKey, ChassisEntry> chassis_edge_map(const RwgBasisSet& basis) {
  const TriangleMesh& mesh = *basis.mesh;
  std::map<EdgeKey, ChassisEntry> out;
  for (int i = 0; i < basis.size(); ++i) {
    const RwgFunction& f = basis.functions[i];
    if (!is_chassis_basis(mesh, f)) continue;
    const Vec3& a = mesh.vertices[f.v0];
    const Vec3& b = mesh.vertices[f.v1];
    const bool a_first = std::array<double, 3>{a.x, a.y, a.z} <=
                         std::array<double, 3>{b.x, b.y, b.z};
    EdgeKey key = a_first ? EdgeKey{a.x, a.y, a.z, b.x, b.y, b.z}
                          : EdgeKey{b.x, b.y, b.z, a.x, a.y, a.z};
    const Vec3 cp = mesh.centroid(f.tri_plus);
    const Vec3 cm = mesh.centroid(f.tri_minus);
    const bool plus_high = std::array<double, 3>{cp.x, cp.y, cp.z} >
                           std::array<double, 3>{cm.x, cm.y, cm.z};
    out[key] = ChassisEntry{i, plus_high ? 1.0 : -1.0};
  }
  return out;
}

// Peak-MS sample of a tracked mode (first maximum); -1 if never present.
int peak_sample(const TrackedMode& t) {
  int best = -1;
  for (int s = 0; s < static_cast<int>(t.ms.size()); ++s) {
    if (t.raw_index[s] < 0 || !std::isfinite(t.ms[s])) continue;
    if (best < 0 || t.ms[s] > t.ms[best]) best = s;
  }
  return best;
}

double finite_or_zero(double v) { return std::isfinite(v) ? v : 0.0; }

}  // namespace

double isolation_db(const ScatteringMatrix& s, int port_i, int port_j) {
  if (port_i == port_j)
    fail(ErrorKind::InvalidInput, "isolation requires two distinct ports");
  return db20(s.S(port_index(s, port_i), port_index(s, port_j)));
}

double reflection_db(const ScatteringMatrix& s, int port_i) {
  const int i = port_index(s, port_i);
  return db20(s.S(i, i));
}

const char* mode_class_name(ModeClass c) {
  switch (c) {
    case ModeClass::Coupling: return "coupling";
    case ModeClass::NonCoupling: return "non-coupling";
    case ModeClass::Insignificant: return "insignificant";
  }
  return "?";
}

NullMap current_null_map(const TriangleMesh& mesh,
                         const std::vector<double>& tri_current_mag,
                         double null_threshold,
                         double window_area_fraction) {
  if (static_cast<int>(tri_current_mag.size()) != mesh.triangle_count())
    fail(ErrorKind::InvalidInput,
         "current magnitude array does not match the triangle count");
  if (!(null_threshold > 0.0) || !(null_threshold < 1.0))
    fail(ErrorKind::InvalidInput, "null threshold must lie in (0, 1)");
  if (!(window_area_fraction > 0.0) || !(window_area_fraction <= 1.0))
    fail(ErrorKind::InvalidInput, "window fraction must lie in (0, 1]");
  for (double m : tri_current_mag)
    if (!std::isfinite(m) || m < 0.0)
      fail(ErrorKind::InvalidInput,
           "current magnitudes must be finite and non-negative");

  NullMap nm;
  nm.threshold = null_threshold;
  nm.window_fraction = window_area_fraction;
  for (int t = 0; t < mesh.triangle_count(); ++t)
    if (mesh.triangles[t].tag == kRegionChassis) nm.chassis_tris.push_back(t);
  if (nm.chassis_tris.empty())
    fail(ErrorKind::InvalidInput, "mesh has no chassis region");

  double peak = 0.0;
  for (int t : nm.chassis_tris) peak = std::max(peak, tri_current_mag[t]);
  if (!(peak > 0.0))
    fail(ErrorKind::UndefinedNormalization,
         "chassis current is identically zero");

  nm.normalized.reserve(nm.chassis_tris.size());
  nm.mask.reserve(nm.chassis_tris.size());
  for (int t : nm.chassis_tris) {
    const double v = tri_current_mag[t] / peak;
    nm.normalized.push_back(v);
    nm.mask.push_back(v < null_threshold ? 1 : 0);
  }

  // Central window: a rectangle concentric with the chassis bounding box
  // holding `window_area_fraction` of its area (sqrt of the fraction per
  // axis); membership is by triangle centroid.
  const BBox bb = region_bbox(mesh, kRegionChassis);
  const double cx = 0.5 * (bb.xmin + bb.xmax);
  const double cy = 0.5 * (bb.ymin + bb.ymax);
  const double hx = 0.5 * (bb.xmax - bb.xmin) * std::sqrt(window_area_fraction);
  const double hy = 0.5 * (bb.ymax - bb.ymin) * std::sqrt(window_area_fraction);
  for (int t : nm.chassis_tris) {
    const Vec3 c = mesh.centroid(t);
    if (std::abs(c.x - cx) <= hx && std::abs(c.y - cy) <= hy)
      nm.window_tris.push_back(t);
  }
  if (nm.window_tris.empty()) {
    // Degenerate coarse mesh: fall back to the centroid nearest the center
    // so the verdict never rests on an empty window.
    int best = nm.chassis_tris.front();
    double best_d = std::numeric_limits<double>::infinity();
    for (int t : nm.chassis_tris) {
      const Vec3 c = mesh.centroid(t);
      const double d = (c.x - cx) * (c.x - cx) + (c.y - cy) * (c.y - cy);
      if (d < best_d) { best_d = d; best = t; }
    }
    nm.window_tris.push_back(best);
  }

  nm.center_current = 0.0;
  for (int t : nm.window_tris)
    nm.center_current = std::max(nm.center_current, tri_current_mag[t] / peak);
  nm.center_null = nm.center_current < null_threshold;
  return nm;
}

CouplingReport classify_coupling_modes(const std::vector<ModeSet>& sweep,
                                       const TrackedModes& tracked,
                                       const RwgBasisSet& basis, FreqBand band,
                                       double significance_threshold,
                                       double null_threshold,
                                       double window_area_fraction) {
  check_sweep_pair(sweep, tracked, basis);
  check_band_in_grid(tracked.freq_GHz, band);
  const std::vector<int> in_band = in_band_samples(tracked.freq_GHz, band);
  const double mid = 0.5 * (band.first + band.second);
  const int s_center = nearest_sample(tracked.freq_GHz, in_band, mid);
  const std::vector<int> rank_center = ranks_at_sample(tracked, s_center);
  const std::vector<int> rank_start = ranks_at_sample(tracked, 0);

  CouplingReport rep;
  rep.band = band;
  rep.significance_threshold = significance_threshold;
  rep.null_threshold = null_threshold;
  rep.window_area_fraction = window_area_fraction;
  for (int m = 0; m < static_cast<int>(tracked.modes.size()); ++m) {
    const TrackedMode& t = tracked.modes[m];
    ModeEvidence ev;
    ev.tracked_id = t.id;
    ev.rank_at_center = rank_center[m];
    ev.rank_at_start = rank_start[m];

    int s_eval = -1;
    for (int s : in_band) {
      if (t.raw_index[s] < 0 || !std::isfinite(t.ms[s])) continue;
      ev.max_ms_in_band = std::max(ev.max_ms_in_band, t.ms[s]);
      if (s_eval < 0 || std::abs(tracked.freq_GHz[s] - mid) <
                            std::abs(tracked.freq_GHz[s_eval] - mid))
        s_eval = s;
    }
    if (s_eval < 0 || ev.max_ms_in_band < significance_threshold) {
      ev.cls = ModeClass::Insignificant;
      rep.modes.push_back(ev);
      continue;
    }
    const Eigen::VectorXd col = sweep[s_eval].J.col(t.raw_index[s_eval]);
    const SurfaceCurrent sc = surface_current(basis, col);
    const NullMap nm = current_null_map(*basis.mesh, sc.mag, null_threshold,
                                        window_area_fraction);
    ev.eval_freq_GHz = tracked.freq_GHz[s_eval];
    ev.center_current = nm.center_current;
    ev.center_null = nm.center_null;
    ev.cls = nm.center_null ? ModeClass::NonCoupling : ModeClass::Coupling;
    rep.modes.push_back(ev);
  }
  return rep;
}

ModePairing pair_modes_by_chassis(const std::vector<ModeSet>& base_sweep,
                                  const TrackedModes& base_tracked,
                                  const RwgBasisSet& base_basis,
                                  const std::vector<ModeSet>& pert_sweep,
                                  const TrackedModes& pert_tracked,
                                  const RwgBasisSet& pert_basis,
                                  double min_corr) {
  check_sweep_pair(base_sweep, base_tracked, base_basis);
  check_sweep_pair(pert_sweep, pert_tracked, pert_basis);
  if (base_tracked.freq_GHz != pert_tracked.freq_GHz)
    fail(ErrorKind::InvalidInput,
         "scenes must be swept on the same frequency grid");
  if (!(min_corr >= 0.0) || !(min_corr <= 1.0))
    fail(ErrorKind::InvalidInput, "pairing threshold must lie in [0, 1]");

  const auto base_map = chassis_edge_map(base_basis);
  const auto pert_map = chassis_edge_map(pert_basis);
  std::vector<std::pair<ChassisEntry, ChassisEntry>> shared;
  for (const auto& [key, be] : base_map) {
    auto it = pert_map.find(key);
    if (it != pert_map.end()) shared.push_back({be, it->second});
  }
  if (shared.empty())
    fail(ErrorKind::InvalidInput, "scenes share no chassis edges");

  const int nb = static_cast<int>(base_tracked.modes.size());
  const int np = static_cast<int>(pert_tracked.modes.size());
  Eigen::MatrixXd score = Eigen::MatrixXd::Zero(std::max(nb, 1),
                                                std::max(np, 1));
  std::vector<int> base_peak(nb, -1);
  for (int m = 0; m < nb; ++m)
    base_peak[m] = peak_sample(base_tracked.modes[m]);

  for (int m = 0; m < nb; ++m) {
    const int s = base_peak[m];
    if (s < 0) continue;
    Eigen::VectorXd a(shared.size());
    const Eigen::VectorXd bcol =
        base_sweep[s].J.col(base_tracked.modes[m].raw_index[s]);
    for (int e = 0; e < static_cast<int>(shared.size()); ++e)
      a[e] = shared[e].first.sign * bcol[shared[e].first.index];
    const double an = a.norm();
    if (!(an > 0.0)) continue;
    for (int u = 0; u < np; ++u) {
      const TrackedMode& pt = pert_tracked.modes[u];
      if (pt.raw_index[s] < 0) continue;
      Eigen::VectorXd b(shared.size());
      const Eigen::VectorXd pcol = pert_sweep[s].J.col(pt.raw_index[s]);
      for (int e = 0; e < static_cast<int>(shared.size()); ++e)
        b[e] = shared[e].second.sign * pcol[shared[e].second.index];
      const double bn = b.norm();
      if (bn > 0.0) score(m, u) = std::abs(a.dot(b)) / (an * bn);
    }
  }

  ModePairing out;
  std::vector<char> pert_used(np, 0);
  if (nb > 0 && np > 0) {
    const std::vector<int> match = max_assignment(score);
    for (int m = 0; m < nb; ++m) {
      const int u = match[m];
      if (u >= 0 && score(m, u) >= min_corr) {
        out.links.push_back({base_tracked.modes[m].id,
                             pert_tracked.modes[u].id, score(m, u)});
        pert_used[u] = 1;
      } else {
        out.lost_base_ids.push_back(base_tracked.modes[m].id);
      }
    }
  } else {
    for (const TrackedMode& t : base_tracked.modes)
      out.lost_base_ids.push_back(t.id);
  }
  for (int u = 0; u < np; ++u)
    if (!pert_used[u]) out.new_pert_ids.push_back(pert_tracked.modes[u].id);
  return out;
}

double band_length(const std::vector<FreqBand>& bands) {
  double len = 0.0;
  for (const FreqBand& b : bands) len += std::max(0.0, b.second - b.first);
  return len;
}

double band_overlap_length(const std::vector<FreqBand>& a,
                           const std::vector<FreqBand>& b) {
  double len = 0.0;
  for (const FreqBand& x : a)
    for (const FreqBand& y : b) {
      const double lo = std::max(x.first, y.first);
      const double hi = std::min(x.second, y.second);
      len += std::max(0.0, hi - lo);
    }
  return len;
}

PerturbationReport perturbation_report(
    const std::vector<ModeSet>& base_sweep, const TrackedModes& base_tracked,
    const RwgBasisSet& base_basis, const std::vector<ModeSet>& pert_sweep,
    const TrackedModes& pert_tracked, const RwgBasisSet& pert_basis,
    const ModePairing& pairing, double ms_threshold) {
  check_sweep_pair(base_sweep, base_tracked, base_basis);
  check_sweep_pair(pert_sweep, pert_tracked, pert_basis);
  if (base_tracked.freq_GHz != pert_tracked.freq_GHz)
    fail(ErrorKind::InvalidInput,
         "scenes must be swept on the same frequency grid");

  const auto pert_by_id = [&](int id) -> const TrackedMode* {
    for (const TrackedMode& t : pert_tracked.modes)
      if (t.id == id) return &t;
    return nullptr;
  };

  PerturbationReport rep;
  rep.freq_GHz = base_tracked.freq_GHz;
  rep.new_pert_ids = pairing.new_pert_ids;
  const int ns = static_cast<int>(rep.freq_GHz.size());

  for (const TrackedMode& bt : base_tracked.modes) {
    ModePerturbation mp;
    mp.base_id = bt.id;
    const TrackedMode* pt = nullptr;
    for (const ModePairing::Link& l : pairing.links)
      if (l.base_id == bt.id) {
        mp.pert_id = l.pert_id;
        mp.pairing_corr = l.corr;
        pt = pert_by_id(l.pert_id);
        if (!pt)
          fail(ErrorKind::InvalidInput,
               "pairing references an unknown perturbed mode id");
        break;
      }

    mp.base_bands = radiating_band(rep.freq_GHz, bt.ms, ms_threshold);
    if (pt) mp.pert_bands = radiating_band(rep.freq_GHz, pt->ms, ms_threshold);
    const double base_len = band_length(mp.base_bands);
    if (base_len > 0.0)
      mp.band_overlap =
          band_overlap_length(mp.base_bands, mp.pert_bands) / base_len;
    else
      mp.band_overlap = mp.pert_bands.empty() ? 1.0 : 0.0;

    for (int s = 0; s < ns; ++s) {
      const double b = finite_or_zero(bt.ms[s]);
      const double p = pt ? finite_or_zero(pt->ms[s]) : 0.0;
      mp.ms_linf_dev = std::max(mp.ms_linf_dev, std::abs(b - p));
    }

    const int sb = peak_sample(bt);
    if (sb >= 0) {
      const SurfaceCurrent sc = surface_current(
          base_basis, Eigen::VectorXd(base_sweep[sb].J.col(bt.raw_index[sb])));
      mp.base_element_fraction = element_fraction(*base_basis.mesh, sc.mag);
    }
    const int sp = pt ? peak_sample(*pt) : -1;
    if (sp >= 0) {
      const SurfaceCurrent sc = surface_current(
          pert_basis, Eigen::VectorXd(pert_sweep[sp].J.col(pt->raw_index[sp])));
      mp.pert_element_fraction = element_fraction(*pert_basis.mesh, sc.mag);
    }
    mp.maxima_relocated =
        mp.pert_element_fraction - mp.base_element_fraction >= 0.5;
    rep.modes.push_back(mp);
  }
  return rep;
}

DgsRecord dgs_compare(const std::vector<ScatteringMatrix>& before,
                      const std::vector<ScatteringMatrix>& after,
                      FreqBand band, const CouplingReport* cls_before,
                      const CouplingReport* cls_after,
                      const ModePairing* pairing,
                      double reflection_threshold_db) {
  if (before.empty() || before.size() != after.size())
    fail(ErrorKind::InvalidInput,
         "scenes must be swept on the same frequency grid");
  std::vector<double> grid;
  for (size_t s = 0; s < before.size(); ++s) {
    if (std::abs(before[s].freq_GHz - after[s].freq_GHz) > 1e-12)
      fail(ErrorKind::InvalidInput,
           "scenes must be swept on the same frequency grid");
    if (before[s].port_ids != before[0].port_ids ||
        after[s].port_ids != before[0].port_ids)
      fail(ErrorKind::InvalidInput, "scenes expose different port sets");
    grid.push_back(before[s].freq_GHz);
  }
  check_band_in_grid(grid, band);
  const std::vector<int> in_band = in_band_samples(grid, band);
  const std::vector<int>& ports = before[0].port_ids;

  DgsRecord rec;
  rec.band = band;
  rec.reflection_threshold_db = reflection_threshold_db;

  for (size_t i = 0; i < ports.size(); ++i)
    for (size_t j = i + 1; j < ports.size(); ++j) {
      IsolationDelta d;
      d.port_i = ports[i];
      d.port_j = ports[j];
      d.worst_before_db = d.worst_after_db = -std::numeric_limits<double>::infinity();
      for (int s : in_band) {
        d.worst_before_db = std::max(d.worst_before_db,
                                     isolation_db(before[s], ports[i], ports[j]));
        d.worst_after_db = std::max(d.worst_after_db,
                                    isolation_db(after[s], ports[i], ports[j]));
      }
      d.delta_db = d.worst_before_db - d.worst_after_db;
      rec.isolation.push_back(d);
    }

  for (int p : ports) {
    ReflectionShift rs;
    rs.port = p;
    std::vector<double> vb, va;  // negated reflection, whole sweep
    for (size_t s = 0; s < before.size(); ++s) {
      vb.push_back(-reflection_db(before[s], p));
      va.push_back(-reflection_db(after[s], p));
    }
    rs.bands_before = radiating_band(grid, vb, -reflection_threshold_db);
    rs.bands_after = radiating_band(grid, va, -reflection_threshold_db);
    const double len = band_length(rs.bands_before);
    if (len > 0.0)
      rs.overlap_ratio =
          band_overlap_length(rs.bands_before, rs.bands_after) / len;
    else
      rs.overlap_ratio = rs.bands_after.empty() ? 1.0 : 0.0;
    rec.reflection.push_back(rs);
  }

  if (cls_before && cls_after && pairing) {
    const auto find_cls = [](const CouplingReport& r, int id) {
      for (const ModeEvidence& e : r.modes)
        if (e.tracked_id == id) return e.cls;
      fail(ErrorKind::InvalidInput,
           "pairing references an id missing from a coupling report");
    };
    for (const ModePairing::Link& l : pairing->links)
      rec.classification.push_back({l.base_id, l.pert_id,
                                    find_cls(*cls_before, l.base_id),
                                    find_cls(*cls_after, l.pert_id)});
  }
  return rec;
}

}  // namespace tcmom
