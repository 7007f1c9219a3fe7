#include <algorithm>
#include <cmath>
#include <map>
#include <vector>

#include "doctest.h"
#include "tcmom/errors.hpp"
#include "tcmom/geometry.hpp"
#include "tcmom/scene.hpp"

using namespace tcmom;

namespace {

std::map<int, int> region_counts(const TriangleMesh& mesh) {
  std::map<int, int> counts;
  for (const Triangle& t : mesh.triangles) counts[t.tag]++;
  return counts;
}

}  // namespace

TEST_CASE("scene: preset census regressions") {
  // Frozen structural counts. Holes follow from the topology: each welded
  // U-loop adds one hole, the ground slot adds one more.
  struct Row {
    const char* name;
    int v, t, ei, holes, ports;
  };
  const Row rows[] = {
      {"chassis", 231, 400, 570, 0, 0},
      {"mimo1", 257, 428, 599, 1, 1},
      {"mimo2-short-edge", 283, 456, 628, 2, 2},
      {"mimo4", 335, 512, 686, 4, 4},
      {"mimo4-dgs", 328, 480, 628, 5, 4},
  };
  for (const Row& r : rows) {
    CAPTURE(r.name);
    const Scene sc = make_scene(r.name);
    const MeshStats st = census(sc.mesh);
    CHECK(st.vertices == r.v);
    CHECK(st.triangles == r.t);
    CHECK(st.interior_edges == r.ei);
    CHECK(st.holes == r.holes);
    CHECK(static_cast<int>(sc.ports.size()) == r.ports);
    CHECK(static_cast<int>(sc.basis.functions.size()) == st.interior_edges);
  }
}

TEST_CASE("scene: element regions are congruent and tagged by port") {
  const Scene sc = make_scene("mimo4");
  const std::map<int, int> counts = region_counts(sc.mesh);
  // 120x60 plate at 6 mm cells = 20 x 10 cells, two triangles each.
  CHECK(counts.at(kRegionChassis) == 400);
  for (int tag : {1, 2, 3, 4}) {
    CAPTURE(tag);
    CHECK(counts.at(tag) == counts.at(1));  // four congruent elements
    CHECK(counts.at(tag) > 0);
  }

  // Elements reach 36 mm outward from the short edges and occupy one
  // 24 mm-tall corner band each.
  const BBox e1 = region_bbox(sc.mesh, 1);
  CHECK(e1.xmin == doctest::Approx(-36.0));
  CHECK(e1.xmax == doctest::Approx(0.0));
  CHECK(e1.ymin == doctest::Approx(0.0));
  CHECK(e1.ymax == doctest::Approx(24.0));
  const BBox e2 = region_bbox(sc.mesh, 2);
  CHECK(e2.ymin == doctest::Approx(36.0));
  CHECK(e2.ymax == doctest::Approx(60.0));
  const BBox e3 = region_bbox(sc.mesh, 3);
  CHECK(e3.xmin == doctest::Approx(120.0));
  CHECK(e3.xmax == doctest::Approx(156.0));
  const BBox e4 = region_bbox(sc.mesh, 4);
  CHECK(e4.xmin == doctest::Approx(120.0));
  CHECK(e4.ymin == doctest::Approx(36.0));
}

TEST_CASE("scene: ground slot removes exactly the cut cells") {
  const Scene whole = make_scene("mimo4");
  const Scene cut = make_scene("mimo4-dgs");
  // The 12 x 48 mm slot covers 2 x 8 cells of two triangles each.
  const int removed = region_counts(whole.mesh).at(kRegionChassis) -
                      region_counts(cut.mesh).at(kRegionChassis);
  CHECK(removed == 32);
  // Elements are untouched by the cut.
  for (int tag : {1, 2, 3, 4})
    CHECK(region_counts(cut.mesh).at(tag) == region_counts(whole.mesh).at(tag));
}

TEST_CASE("scene: ports sit on the chassis weld lines in id order") {
  const Scene sc = make_scene("mimo4");
  REQUIRE(sc.ports.size() == 4);
  for (size_t i = 0; i + 1 < sc.ports.size(); ++i)
    CHECK(sc.ports[i].port_id < sc.ports[i + 1].port_id);
  for (const PortSpec& p : sc.ports) {
    CHECK(p.z0_ohm == doctest::Approx(450.0));
    CHECK(p.edge_len_m == doctest::Approx(0.006));
  }
  // Gap edges lie exactly on the short edges of the chassis.
  for (const PortEdge& pe : sc.mesh.port_edges) {
    const double x0 = sc.mesh.vertices[pe.v0].x;
    const double x1 = sc.mesh.vertices[pe.v1].x;
    const double expected = (pe.port_id <= 2) ? 0.0 : 120.0;
    CHECK(x0 == doctest::Approx(expected));
    CHECK(x1 == doctest::Approx(expected));
  }
}

TEST_CASE("scene: builds are deterministic") {
  const TriangleMesh a = build_scene(scene_preset("mimo4-dgs"));
  const TriangleMesh b = build_scene(scene_preset("mimo4-dgs"));
  CHECK(meshes_identical(a, b));
}

TEST_CASE("scene: preset lookup") {
  const std::vector<std::string> names = scene_preset_names();
  CHECK(names.size() == 5);
  for (const std::string& n : names) CHECK_NOTHROW(scene_preset(n));
  CHECK_THROWS_WITH_AS(scene_preset("mimo3"), doctest::Contains("config-error"),
                       Error);
  // Ported presets carry the calibrated reference impedance; a fresh custom
  // spec keeps the conventional 50 ohm default.
  CHECK(scene_preset("mimo4").z0_ohm == doctest::Approx(450.0));
  CHECK(SceneSpec{}.z0_ohm == doctest::Approx(50.0));
  CHECK(scene_preset("chassis").elements.empty());
  CHECK(scene_preset("mimo4-dgs").slot->width_mm == doctest::Approx(48.0));
}

TEST_CASE("scene: slot study input validation") {
  const std::vector<double> g{2.4};
  CHECK_THROWS_WITH_AS(
      dgs_effect("mimo4-dgs", "mimo4-dgs", FreqBand{2.4, 2.4}, g),
      doctest::Contains("already has a slot"), Error);
  CHECK_THROWS_WITH_AS(dgs_effect("mimo4", "mimo4", FreqBand{2.4, 2.4}, g),
                       doctest::Contains("missing its slot"), Error);
  SceneSpec other = scene_preset("mimo4");
  other.z0_ohm = 50.0;
  CHECK_THROWS_WITH_AS(
      dgs_effect(other, scene_preset("mimo4-dgs"), FreqBand{2.4, 2.4}, g),
      doctest::Contains("differ only by the ground slot"), Error);
  SceneSpec bare = scene_preset("chassis");
  SceneSpec bare_slot = bare;
  bare_slot.slot = SlotRect{60.0, 30.0, 12.0, 48.0};
  CHECK_THROWS_WITH_AS(
      dgs_effect(bare, bare_slot, FreqBand{2.4, 2.4}, g),
      doctest::Contains("needs at least one port"), Error);
}

TEST_CASE("scene: sweep bundles scattering and modes") {
  const Scene sc = make_scene("mimo1");
  CHECK_THROWS_WITH_AS(sweep_scene(sc, {}), doctest::Contains("invalid-input"),
                       Error);
  const SceneSweep sw = sweep_scene(sc, {2.4}, 4);
  REQUIRE(sw.s.size() == 1);
  CHECK(sw.s[0].S.rows() == 1);
  CHECK(sw.s[0].port_ids == std::vector<int>{1});
  REQUIRE(sw.modes.size() == 1);
  CHECK(sw.modes[0].lambda.size() == 4);
  CHECK(!sw.tracked.modes.empty());

  const Scene bare = make_scene("chassis");
  const SceneSweep swb = sweep_scene(bare, {2.4}, 4);
  CHECK(swb.s.empty());  // portless scene still yields modes
  CHECK(swb.modes.size() == 1);
}
