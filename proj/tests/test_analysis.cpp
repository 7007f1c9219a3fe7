#include <algorithm>
#include <cmath>
#include <vector>

#include "doctest.h"
#include "tcmom/analysis.hpp"
#include "tcmom/cma.hpp"
#include "tcmom/errors.hpp"
#include "tcmom/geometry.hpp"
#include "tcmom/mom.hpp"
#include "tcmom/rwg.hpp"

using namespace tcmom;

namespace {

// Symmetric 2x2 scattering sample with magnitudes given in dB, zero phase.
ScatteringMatrix s2(double freq, double s11_db, double s22_db, double s12_db,
                    std::vector<int> ports = {1, 2}) {
  ScatteringMatrix s;
  s.freq_GHz = freq;
  s.port_ids = std::move(ports);
  s.S = Eigen::MatrixXcd::Zero(2, 2);
  s.S(0, 0) = std::pow(10.0, s11_db / 20.0);
  s.S(1, 1) = std::pow(10.0, s22_db / 20.0);
  s.S(0, 1) = s.S(1, 0) = std::pow(10.0, s12_db / 20.0);
  s.z_ref_ohm = {50.0, 50.0};
  return s;
}

// Central-window membership mirroring the documented convention: rectangle
// concentric with the chassis bbox holding `frac` of its area.
bool in_window(const TriangleMesh& mesh, int t, double frac) {
  const BBox bb = region_bbox(mesh, kRegionChassis);
  const double cx = 0.5 * (bb.xmin + bb.xmax);
  const double cy = 0.5 * (bb.ymin + bb.ymax);
  const double hx = 0.5 * (bb.xmax - bb.xmin) * std::sqrt(frac);
  const double hy = 0.5 * (bb.ymax - bb.ymin) * std::sqrt(frac);
  const Vec3 c = mesh.centroid(t);
  return std::abs(c.x - cx) <= hx && std::abs(c.y - cy) <= hy;
}

}  // namespace

TEST_CASE("analysis: isolation and reflection lookups") {
  ScatteringMatrix s = s2(2.4, -6.0, -12.0, -20.0, {7, 3});
  CHECK(isolation_db(s, 7, 3) == doctest::Approx(-20.0).epsilon(1e-12));
  CHECK(isolation_db(s, 3, 7) == doctest::Approx(-20.0).epsilon(1e-12));
  CHECK(reflection_db(s, 7) == doctest::Approx(-6.0).epsilon(1e-12));
  CHECK(reflection_db(s, 3) == doctest::Approx(-12.0).epsilon(1e-12));
  CHECK_THROWS_WITH_AS(isolation_db(s, 7, 7),
                       doctest::Contains("invalid-input"), Error);
  CHECK_THROWS_WITH_AS(isolation_db(s, 7, 9),
                       doctest::Contains("invalid-port"), Error);
  CHECK_THROWS_WITH_AS(reflection_db(s, 1), doctest::Contains("invalid-port"),
                       Error);
}

TEST_CASE("analysis: null map on a uniform plate") {
  const TriangleMesh mesh = build_rect_plate(30.0, 20.0, 5.0);
  const int n = mesh.triangle_count();
  std::vector<double> mags(n, 2.5);
  const NullMap nm = current_null_map(mesh, mags);
  CHECK(static_cast<int>(nm.chassis_tris.size()) == n);
  CHECK(std::all_of(nm.normalized.begin(), nm.normalized.end(),
                    [](double v) { return v == 1.0; }));
  CHECK(std::none_of(nm.mask.begin(), nm.mask.end(),
                     [](char m) { return m != 0; }));
  CHECK(nm.center_current == doctest::Approx(1.0));
  CHECK_FALSE(nm.center_null);
  CHECK_FALSE(nm.window_tris.empty());
  for (int t : nm.window_tris) CHECK(in_window(mesh, t, 0.10));

  // Scale invariance: normalization removes any overall magnitude.
  for (double& m : mags) m *= 1.0e6;
  const NullMap big = current_null_map(mesh, mags);
  CHECK(big.normalized == nm.normalized);
  CHECK(big.mask == nm.mask);
  CHECK(big.center_null == nm.center_null);
}

TEST_CASE("analysis: null map center null and exact mask semantics") {
  const TriangleMesh mesh = build_rect_plate(30.0, 20.0, 5.0);
  const int n = mesh.triangle_count();

  std::vector<double> mags(n, 1.0);
  int inside = 0;
  for (int t = 0; t < n; ++t)
    if (in_window(mesh, t, 0.10)) {
      mags[t] = 0.02;
      ++inside;
    }
  REQUIRE(inside > 0);

  const NullMap nm = current_null_map(mesh, mags, 0.1);
  CHECK(nm.center_null);
  CHECK(nm.center_current == doctest::Approx(0.02));
  CHECK(static_cast<int>(nm.window_tris.size()) == inside);
  for (size_t i = 0; i < nm.chassis_tris.size(); ++i)
    CHECK(static_cast<bool>(nm.mask[i]) == (nm.normalized[i] < 0.1));

  // A value exactly at threshold * max is NOT masked (strict less-than).
  std::vector<double> edge(n, 1.0);
  edge[0] = 0.1;
  const NullMap em = current_null_map(mesh, edge, 0.1);
  CHECK(em.normalized[0] == 0.1);
  CHECK(em.mask[0] == 0);

  // Mask grows monotonically with the threshold.
  std::vector<double> varied(n);
  for (int t = 0; t < n; ++t) varied[t] = 0.01 + 0.99 * ((t * 7) % 13) / 12.0;
  const NullMap a = current_null_map(mesh, varied, 0.05);
  const NullMap b = current_null_map(mesh, varied, 0.30);
  const NullMap c = current_null_map(mesh, varied, 0.80);
  for (int i = 0; i < n; ++i) {
    if (a.mask[i]) CHECK(b.mask[i]);
    if (b.mask[i]) CHECK(c.mask[i]);
  }
}

TEST_CASE("analysis: null map normalizes over the chassis region only") {
  TriangleMesh mesh = build_rect_plate(30.0, 20.0, 5.0);
  const int n = mesh.triangle_count();
  mesh.triangles[0].tag = 1;  // pretend two triangles belong to an element
  mesh.triangles[1].tag = 1;

  std::vector<double> mags(n, 1.0);
  mags[0] = mags[1] = 100.0;  // strong element current must not rescale
  const NullMap nm = current_null_map(mesh, mags);
  CHECK(static_cast<int>(nm.chassis_tris.size()) == n - 2);
  CHECK(std::find(nm.chassis_tris.begin(), nm.chassis_tris.end(), 0) ==
        nm.chassis_tris.end());
  CHECK(std::all_of(nm.normalized.begin(), nm.normalized.end(),
                    [](double v) { return v == 1.0; }));
  CHECK_FALSE(nm.center_null);
}

TEST_CASE("analysis: null map validation") {
  const TriangleMesh mesh = build_rect_plate(30.0, 20.0, 5.0);
  const int n = mesh.triangle_count();
  const std::vector<double> ok(n, 1.0);

  CHECK_THROWS_WITH_AS(current_null_map(mesh, std::vector<double>(n - 1, 1.0)),
                       doctest::Contains("invalid-input"), Error);
  CHECK_THROWS_WITH_AS(current_null_map(mesh, std::vector<double>(n, 0.0)),
                       doctest::Contains("undefined-normalization"), Error);
  CHECK_THROWS_AS(current_null_map(mesh, ok, 0.0), Error);
  CHECK_THROWS_AS(current_null_map(mesh, ok, 1.0), Error);
  CHECK_THROWS_AS(current_null_map(mesh, ok, -0.2), Error);
  CHECK_THROWS_AS(current_null_map(mesh, ok, 0.1, 0.0), Error);
  CHECK_THROWS_AS(current_null_map(mesh, ok, 0.1, 1.5), Error);

  std::vector<double> bad = ok;
  bad[3] = std::nan("");
  CHECK_THROWS_AS(current_null_map(mesh, bad), Error);
  bad[3] = -1.0;
  CHECK_THROWS_AS(current_null_map(mesh, bad), Error);

  TriangleMesh all_element = mesh;
  for (auto& t : all_element.triangles) t.tag = 2;
  CHECK_THROWS_WITH_AS(current_null_map(all_element, ok),
                       doctest::Contains("no chassis region"), Error);
}

TEST_CASE("analysis: band length and overlap helpers") {
  CHECK(band_length({}) == 0.0);
  CHECK(band_length({{1.0, 2.0}, {3.0, 4.5}}) == doctest::Approx(2.5));
  CHECK(band_overlap_length({{1.0, 2.0}}, {{1.5, 3.0}}) ==
        doctest::Approx(0.5));
  CHECK(band_overlap_length({{1.0, 2.0}}, {{2.5, 3.0}}) == 0.0);
  CHECK(band_overlap_length({{1.0, 4.0}}, {{2.0, 3.0}}) ==
        doctest::Approx(1.0));
  CHECK(band_overlap_length({}, {{1.0, 2.0}}) == 0.0);
}

TEST_CASE("analysis: classification on a plate sweep") {
  const TriangleMesh mesh = build_rect_plate(30.0, 20.0, 5.0);
  const RwgBasisSet basis = extract_rwg(mesh);
  const std::vector<double> grid = {1.8, 2.0, 2.2};
  const std::vector<ModeSet> sweep = sweep_modes(basis, grid, 4);
  const TrackedModes tracked = track_modes(sweep);
  const FreqBand band{1.8, 2.2};

  const CouplingReport rep = classify_coupling_modes(sweep, tracked, basis,
                                                     band);
  REQUIRE(rep.modes.size() == tracked.modes.size());
  CHECK(rep.band == band);

  for (size_t m = 0; m < rep.modes.size(); ++m) {
    const ModeEvidence& ev = rep.modes[m];
    const TrackedMode& t = tracked.modes[m];
    CHECK(ev.tracked_id == t.id);

    // Independently recompute the in-band MS peak and the verdict.
    double max_ms = 0.0;
    int s_eval = -1;
    for (int s = 0; s < 3; ++s) {
      if (t.raw_index[s] < 0 || !std::isfinite(t.ms[s])) continue;
      max_ms = std::max(max_ms, t.ms[s]);
      if (s_eval < 0 ||
          std::abs(grid[s] - 2.0) < std::abs(grid[s_eval] - 2.0))
        s_eval = s;
    }
    CHECK(ev.max_ms_in_band == doctest::Approx(max_ms).epsilon(1e-12));
    if (max_ms < kMsBandThreshold) {
      CHECK(ev.cls == ModeClass::Insignificant);
      continue;
    }
    REQUIRE(s_eval >= 0);
    const SurfaceCurrent sc = surface_current(
        basis, Eigen::VectorXd(sweep[s_eval].J.col(t.raw_index[s_eval])));
    const NullMap nm = current_null_map(mesh, sc.mag, rep.null_threshold);
    CHECK(ev.eval_freq_GHz == doctest::Approx(grid[s_eval]));
    CHECK(ev.center_null == nm.center_null);
    CHECK(ev.center_current == doctest::Approx(nm.center_current));
    CHECK(ev.cls ==
          (nm.center_null ? ModeClass::NonCoupling : ModeClass::Coupling));
  }

  SUBCASE("significance ranks are a consistent ordering") {
    for (int which : {0, 1}) {
      std::vector<std::pair<int, double>> ranked;  // (rank, ms at sample)
      const int s = which == 0 ? 1 : 0;            // center sample is index 1
      for (size_t m = 0; m < rep.modes.size(); ++m) {
        const int r = which == 0 ? rep.modes[m].rank_at_center
                                 : rep.modes[m].rank_at_start;
        const TrackedMode& t = tracked.modes[m];
        const bool present =
            t.raw_index[s] >= 0 && std::isfinite(t.ms[s]);
        CHECK((r > 0) == present);
        if (present) ranked.push_back({r, t.ms[s]});
      }
      std::sort(ranked.begin(), ranked.end());
      for (size_t i = 0; i < ranked.size(); ++i) {
        CHECK(ranked[i].first == static_cast<int>(i) + 1);
        if (i > 0) CHECK(ranked[i - 1].second >= ranked[i].second);
      }
    }
  }

  SUBCASE("verdicts are invariant to eigencurrent sign and scale") {
    std::vector<ModeSet> scaled = sweep;
    for (ModeSet& s : scaled) {
      s.J *= -3.0;
      s.RJ *= -3.0;
    }
    const CouplingReport rep2 =
        classify_coupling_modes(scaled, tracked, basis, band);
    REQUIRE(rep2.modes.size() == rep.modes.size());
    for (size_t m = 0; m < rep.modes.size(); ++m) {
      CHECK(rep2.modes[m].cls == rep.modes[m].cls);
      CHECK(rep2.modes[m].center_null == rep.modes[m].center_null);
      CHECK(rep2.modes[m].center_current ==
            doctest::Approx(rep.modes[m].center_current));
    }
  }

  SUBCASE("band validation") {
    CHECK_THROWS_WITH_AS(
        classify_coupling_modes(sweep, tracked, basis, {2.2, 1.8}),
        doctest::Contains("invalid-input"), Error);
    CHECK_THROWS_WITH_AS(
        classify_coupling_modes(sweep, tracked, basis, {0.5, 2.0}),
        doctest::Contains("outside"), Error);
    CHECK_THROWS_WITH_AS(
        classify_coupling_modes(sweep, tracked, basis, {1.85, 1.95}),
        doctest::Contains("no sweep samples"), Error);
    const RwgBasisSet other = extract_rwg(build_rect_plate(25.0, 20.0, 5.0));
    CHECK_THROWS_WITH_AS(classify_coupling_modes(sweep, tracked, other, band),
                         doctest::Contains("invalid-input"), Error);
  }
}

TEST_CASE("analysis: mode pairing") {
  const TriangleMesh mesh = build_rect_plate(30.0, 20.0, 5.0);
  const RwgBasisSet basis = extract_rwg(mesh);
  const std::vector<double> grid = {2.0, 2.05};
  const std::vector<ModeSet> sweep = sweep_modes(basis, grid, 4);
  const TrackedModes tracked = track_modes(sweep);

  SUBCASE("a scene paired with itself maps every mode to itself") {
    const ModePairing p = pair_modes_by_chassis(sweep, tracked, basis, sweep,
                                                tracked, basis);
    CHECK(p.links.size() == tracked.modes.size());
    CHECK(p.lost_base_ids.empty());
    CHECK(p.new_pert_ids.empty());
    for (const ModePairing::Link& l : p.links) {
      CHECK(l.base_id == l.pert_id);
      CHECK(l.corr == doctest::Approx(1.0).epsilon(1e-9));
    }
  }

  SUBCASE("a small central slot preserves most pairings") {
    const TriangleMesh cut = cut_rect_slot(mesh, SlotRect{15.0, 10.0, 5.0, 5.0});
    REQUIRE(cut.triangle_count() < mesh.triangle_count());
    const RwgBasisSet cut_basis = extract_rwg(cut);
    const std::vector<ModeSet> cut_sweep = sweep_modes(cut_basis, grid, 4);
    const TrackedModes cut_tracked = track_modes(cut_sweep);

    const ModePairing p = pair_modes_by_chassis(
        sweep, tracked, basis, cut_sweep, cut_tracked, cut_basis);
    CHECK(p.links.size() >= 2);
    CHECK(p.links.size() + p.lost_base_ids.size() == tracked.modes.size());
    CHECK(p.links.size() + p.new_pert_ids.size() == cut_tracked.modes.size());
    for (const ModePairing::Link& l : p.links) {
      CHECK(l.corr >= 0.5);
      CHECK(l.corr <= 1.0 + 1e-12);
    }
  }

  SUBCASE("validation") {
    const std::vector<ModeSet> one = sweep_modes(basis, {2.0}, 4);
    const TrackedModes one_tracked = track_modes(one);
    CHECK_THROWS_WITH_AS(
        pair_modes_by_chassis(sweep, tracked, basis, one, one_tracked, basis),
        doctest::Contains("same frequency grid"), Error);
    CHECK_THROWS_WITH_AS(pair_modes_by_chassis(sweep, tracked, basis, sweep,
                                               tracked, basis, 1.5),
                         doctest::Contains("invalid-input"), Error);
  }
}

TEST_CASE("analysis: perturbation report") {
  const TriangleMesh mesh = build_rect_plate(30.0, 20.0, 5.0);
  const RwgBasisSet basis = extract_rwg(mesh);
  const std::vector<double> grid = {2.0, 2.05};
  const std::vector<ModeSet> sweep = sweep_modes(basis, grid, 4);
  const TrackedModes tracked = track_modes(sweep);

  SUBCASE("identical scenes give the identity report") {
    const ModePairing p = pair_modes_by_chassis(sweep, tracked, basis, sweep,
                                                tracked, basis);
    const PerturbationReport rep = perturbation_report(
        sweep, tracked, basis, sweep, tracked, basis, p);
    REQUIRE(rep.modes.size() == tracked.modes.size());
    CHECK(rep.freq_GHz == grid);
    CHECK(rep.new_pert_ids.empty());
    for (const ModePerturbation& mp : rep.modes) {
      CHECK(mp.pert_id == mp.base_id);
      CHECK(mp.band_overlap == doctest::Approx(1.0).epsilon(1e-12));
      CHECK(mp.ms_linf_dev == 0.0);
      CHECK_FALSE(mp.maxima_relocated);
      CHECK(mp.base_element_fraction == mp.pert_element_fraction);
      CHECK(mp.base_element_fraction == 0.0);  // plate has no elements
    }
  }

  SUBCASE("an empty pairing reports every mode as lost") {
    ModePairing none;
    for (const TrackedMode& t : tracked.modes)
      none.lost_base_ids.push_back(t.id);
    const PerturbationReport rep = perturbation_report(
        sweep, tracked, basis, sweep, tracked, basis, none);
    for (size_t m = 0; m < rep.modes.size(); ++m) {
      const ModePerturbation& mp = rep.modes[m];
      CHECK(mp.pert_id == -1);
      CHECK(mp.pairing_corr == 0.0);
      CHECK(mp.pert_bands.empty());
      const TrackedMode& t = tracked.modes[m];
      double expect_dev = 0.0;
      for (double v : t.ms)
        if (std::isfinite(v)) expect_dev = std::max(expect_dev, v);
      CHECK(mp.ms_linf_dev == doctest::Approx(expect_dev));
      CHECK(mp.band_overlap ==
            doctest::Approx(mp.base_bands.empty() ? 1.0 : 0.0));
      CHECK_FALSE(mp.maxima_relocated);
    }
  }

  SUBCASE("grid mismatch is rejected") {
    const std::vector<ModeSet> one = sweep_modes(basis, {2.0}, 4);
    const TrackedModes one_tracked = track_modes(one);
    CHECK_THROWS_WITH_AS(
        perturbation_report(sweep, tracked, basis, one, one_tracked, basis,
                            ModePairing{}),
        doctest::Contains("same frequency grid"), Error);
  }
}

TEST_CASE("analysis: slot comparison record") {
  const std::vector<double> grid = {2.0, 2.2, 2.4};
  // Port 1 matching band moves right by 0.1 GHz; port 2 is matched
  // everywhere; isolation improves from -11 dB to -22 dB.
  const std::vector<ScatteringMatrix> before = {
      s2(2.0, -15.0, -20.0, -11.0), s2(2.2, -15.0, -20.0, -11.0),
      s2(2.4, -5.0, -20.0, -11.0)};
  const std::vector<ScatteringMatrix> after = {
      s2(2.0, -5.0, -20.0, -22.0), s2(2.2, -15.0, -20.0, -22.0),
      s2(2.4, -15.0, -20.0, -22.0)};

  const DgsRecord rec = dgs_compare(before, after, {2.0, 2.4});
  REQUIRE(rec.isolation.size() == 1);
  CHECK(rec.isolation[0].port_i == 1);
  CHECK(rec.isolation[0].port_j == 2);
  CHECK(rec.isolation[0].worst_before_db == doctest::Approx(-11.0));
  CHECK(rec.isolation[0].worst_after_db == doctest::Approx(-22.0));
  CHECK(rec.isolation[0].delta_db == doctest::Approx(11.0));

  REQUIRE(rec.reflection.size() == 2);
  const ReflectionShift& r1 = rec.reflection[0];
  CHECK(r1.port == 1);
  REQUIRE(r1.bands_before.size() == 1);
  CHECK(r1.bands_before[0].first == doctest::Approx(2.0));
  CHECK(r1.bands_before[0].second == doctest::Approx(2.3));
  REQUIRE(r1.bands_after.size() == 1);
  CHECK(r1.bands_after[0].first == doctest::Approx(2.1));
  CHECK(r1.bands_after[0].second == doctest::Approx(2.4));
  CHECK(r1.overlap_ratio == doctest::Approx(2.0 / 3.0));

  const ReflectionShift& r2 = rec.reflection[1];
  REQUIRE(r2.bands_before.size() == 1);
  CHECK(r2.bands_before[0].first == doctest::Approx(2.0));
  CHECK(r2.bands_before[0].second == doctest::Approx(2.4));
  CHECK(r2.overlap_ratio == doctest::Approx(1.0));

  SUBCASE("classification changes ride along when reports are supplied") {
    CouplingReport cb, ca;
    ModeEvidence e;
    e.tracked_id = 1;
    e.cls = ModeClass::Coupling;
    cb.modes.push_back(e);
    e.tracked_id = 2;
    e.cls = ModeClass::NonCoupling;
    cb.modes.push_back(e);
    ca = cb;
    ca.modes[0].cls = ModeClass::NonCoupling;
    ModePairing p;
    p.links = {{1, 1, 0.95}, {2, 2, 0.9}};

    const DgsRecord full =
        dgs_compare(before, after, {2.0, 2.4}, &cb, &ca, &p);
    REQUIRE(full.classification.size() == 2);
    CHECK(full.classification[0].before_cls == ModeClass::Coupling);
    CHECK(full.classification[0].after_cls == ModeClass::NonCoupling);
    CHECK(full.classification[1].before_cls == ModeClass::NonCoupling);
    CHECK(full.classification[1].after_cls == ModeClass::NonCoupling);

    p.links.push_back({9, 9, 0.8});
    CHECK_THROWS_WITH_AS(dgs_compare(before, after, {2.0, 2.4}, &cb, &ca, &p),
                         doctest::Contains("missing"), Error);
  }

  SUBCASE("validation") {
    CHECK_THROWS_AS(dgs_compare({}, {}, {2.0, 2.4}), Error);
    std::vector<ScatteringMatrix> shifted = after;
    shifted[1].freq_GHz = 2.21;
    CHECK_THROWS_WITH_AS(dgs_compare(before, shifted, {2.0, 2.4}),
                         doctest::Contains("same frequency grid"), Error);
    std::vector<ScatteringMatrix> other_ports = after;
    other_ports[0].port_ids = {1, 3};
    CHECK_THROWS_WITH_AS(dgs_compare(before, other_ports, {2.0, 2.4}),
                         doctest::Contains("port sets"), Error);
    CHECK_THROWS_WITH_AS(dgs_compare(before, after, {2.05, 2.15}),
                         doctest::Contains("no sweep samples"), Error);
    CHECK_THROWS_WITH_AS(dgs_compare(before, after, {1.0, 2.4}),
                         doctest::Contains("outside"), Error);
  }
}

TEST_CASE("analysis: mode class names") {
  CHECK(std::string(mode_class_name(ModeClass::Coupling)) == "coupling");
  CHECK(std::string(mode_class_name(ModeClass::NonCoupling)) ==
        "non-coupling");
  CHECK(std::string(mode_class_name(ModeClass::Insignificant)) ==
        "insignificant");
}
