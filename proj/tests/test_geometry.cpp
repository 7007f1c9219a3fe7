#include <sstream>

#include "doctest.h"
#include "tcmom/errors.hpp"
#include "tcmom/geometry.hpp"
#include "tcmom/mesh_io.hpp"
#include "tcmom/rwg.hpp"

using namespace tcmom;

TEST_CASE("rect plate structured grid counts") {
  const TriangleMesh m = build_rect_plate(120, 60, 10);
  CHECK(m.vertex_count() == 91);  // 13 x 7 grid
  CHECK(m.triangle_count() == 144);
  validate_mesh(m);

  const TriangleMesh single = build_rect_plate(10, 10, 10);
  CHECK(single.vertex_count() == 4);
  CHECK(single.triangle_count() == 2);

  const TriangleMesh fine = build_rect_plate(120, 60, 5);
  CHECK(fine.vertex_count() == 325);  // 25 x 13 grid
  CHECK(fine.triangle_count() == 576);
}

TEST_CASE("rect plate rejects bad dimensions") {
  CHECK_THROWS_AS(build_rect_plate(-1, 60, 10), Error);
  CHECK_THROWS_AS(build_rect_plate(120, 0, 10), Error);
  CHECK_THROWS_AS(build_rect_plate(120, 60, 70), Error);
}

TEST_CASE("edge census Euler consistency on plate") {
  const TriangleMesh m = build_rect_plate(120, 60, 10);
  const MeshStats st = census(m);
  CHECK(st.vertices == 91);
  CHECK(st.triangles == 144);
  // 12x6 cells: 13 vertical grid lines x 6 edges + 7 horizontal lines x 12
  // edges + 72 diagonals = 78 + 84 + 72 = 234.
  CHECK(st.edges == 234);
  CHECK(st.boundary_edges == 36);  // 2*(12+6)
  CHECK(st.interior_edges == 198);
  CHECK(st.holes == 0);  // V - E + F = 91 - 234 + 144 = 1
}

TEST_CASE("rwg count equals interior edge census") {
  const TriangleMesh m = build_rect_plate(120, 60, 10);
  const RwgBasisSet basis = extract_rwg(m);
  CHECK(basis.size() == census(m).interior_edges);
  CHECK(basis.size() == 198);

  // Every basis function is a valid interior edge with consistent data.
  for (const RwgFunction& f : basis.functions) {
    CHECK(f.v0 < f.v1);
    CHECK(f.tri_plus < f.tri_minus);
    CHECK(f.edge_len_mm > 0.0);
    CHECK(f.area_plus_mm2 > 0.0);
    CHECK(f.area_minus_mm2 > 0.0);
  }
}

TEST_CASE("two-triangle mesh has exactly one basis function") {
  const TriangleMesh m = build_rect_plate(10, 10, 10);
  const RwgBasisSet basis = extract_rwg(m);
  CHECK(basis.size() == 1);
}

TEST_CASE("slot cut removes cells and keeps mesh conforming") {
  const TriangleMesh m = build_rect_plate(120, 60, 2);
  SlotRect slot;
  slot.center_x_mm = 60;
  slot.center_y_mm = 30;
  slot.length_mm = 40;
  slot.width_mm = 4;
  const TriangleMesh cut = cut_rect_slot(m, slot);
  validate_mesh(cut);
  // Slot bounds land on mesh lines: (40..80) x (28..32) = 20 x 2 cells.
  CHECK(m.triangle_count() - cut.triangle_count() == 2 * 20 * 2);

  const MeshStats st = census(cut);
  CHECK(st.holes == 1);  // slot interior to the plate opens one hole
}

TEST_CASE("slot narrower than a cell after snapping is rejected") {
  const TriangleMesh m = build_rect_plate(120, 60, 10);
  SlotRect slot;
  slot.center_x_mm = 60;
  slot.center_y_mm = 30;
  slot.length_mm = 40;
  slot.width_mm = 4;  // both y bounds snap to the same 10 mm line
  CHECK_THROWS_WITH_AS(cut_rect_slot(m, slot),
                       doctest::Contains("invalid-geometry"), Error);
}

TEST_CASE("slot outside plate is rejected") {
  const TriangleMesh m = build_rect_plate(120, 60, 10);
  SlotRect slot;
  slot.center_x_mm = 200;
  slot.center_y_mm = 30;
  slot.length_mm = 20;
  slot.width_mm = 10;
  CHECK_THROWS_WITH_AS(cut_rect_slot(m, slot),
                       doctest::Contains("invalid-geometry"), Error);
}

TEST_CASE("slot covering a single-cell plate empties it") {
  const TriangleMesh m = build_rect_plate(10, 10, 10);
  SlotRect slot;
  slot.center_x_mm = 5;
  slot.center_y_mm = 5;
  slot.length_mm = 12;
  slot.width_mm = 12;
  // Covers everything: either invalid (not interior) or empty-mesh.
  CHECK_THROWS_AS(cut_rect_slot(m, slot), Error);
}

TEST_CASE("strip element meshing and feed edge") {
  TriangleMesh board = build_rect_plate(120, 60, 10);
  LoopElementSpec spec;
  spec.path_mm = {{130.0, 20.0}, {150.0, 20.0}};  // detached strip, 20x2
  spec.width_mm = 2.0;
  spec.feed_segment = 0;
  spec.feed_offset_mm = 10.0;
  const int before_v = board.vertex_count();
  const TriangleMesh with = add_strip_loop(board, spec, 1, 2.0);
  validate_mesh(with);
  CHECK(with.vertex_count() == before_v + 22);    // 11 x 2 strip grid
  CHECK(with.triangle_count() == board.triangle_count() + 20);
  CHECK(with.port_count() == 1);

  const RwgBasisSet basis = extract_rwg(with);
  REQUIRE(basis.port_basis.size() == 1);
  const int pb = basis.port_basis[0];
  CHECK(pb >= 0);
  CHECK(pb < basis.size());
  // Feed edge is a strip cross edge of width 2 mm.
  CHECK(basis.functions[pb].edge_len_mm == doctest::Approx(2.0));
}

TEST_CASE("welded strip shares chassis vertices") {
  TriangleMesh board = build_rect_plate(120, 60, 10);
  LoopElementSpec spec;
  // Vertical strip rising from the plate edge at y=60: first vertex on the
  // boundary grid line, so the strip welds to existing chassis vertices.
  spec.path_mm = {{60.0, 60.0}, {60.0, 70.0}};
  spec.width_mm = 2.0;
  spec.feed_segment = 0;
  spec.feed_offset_mm = 4.0;
  const TriangleMesh with = add_strip_loop(board, spec, 1, 2.0);
  validate_mesh(with);  // would reject duplicate vertices within 1e-6 mm
  const MeshStats st = census(with);
  CHECK(st.interior_edges > census(board).interior_edges);
}

TEST_CASE("overlapping strips are rejected") {
  TriangleMesh board = build_rect_plate(120, 60, 10);
  LoopElementSpec spec;
  spec.path_mm = {{130.0, 20.0}, {150.0, 20.0}};
  spec.width_mm = 2.0;
  spec.feed_segment = 0;
  spec.feed_offset_mm = 10.0;
  const TriangleMesh with = add_strip_loop(board, spec, 1, 2.0);
  CHECK_THROWS_WITH_AS(add_strip_loop(with, spec, 2, 2.0),
                       doctest::Contains("invalid-geometry"), Error);
}

TEST_CASE("slot that would remove a port edge is a port-destroyed error") {
  TriangleMesh board = build_rect_plate(120, 60, 10);
  // Port on an interior chassis edge near the middle.
  board = add_port_on_edge(board, {60, 30, 0}, {60, 40, 0}, 1);
  SlotRect slot;
  slot.center_x_mm = 60;
  slot.center_y_mm = 30;
  slot.length_mm = 30;
  slot.width_mm = 15;
  CHECK_THROWS_WITH_AS(cut_rect_slot(board, slot),
                       doctest::Contains("port-destroyed"), Error);
}

TEST_CASE("mesh file round trip is exact") {
  TriangleMesh m = build_rect_plate(40, 20, 10);
  m = add_port_on_edge(m, {10, 10, 0}, {20, 10, 0}, 3);
  const std::string text = mesh_to_string(m);
  std::istringstream is(text);
  const TriangleMesh back = read_mesh(is);
  CHECK(meshes_identical(m, back));
  CHECK(mesh_to_string(back) == text);
}

TEST_CASE("mesh determinism is byte level") {
  const std::string a = mesh_to_string(build_rect_plate(120, 60, 6));
  const std::string b = mesh_to_string(build_rect_plate(120, 60, 6));
  CHECK(a == b);
}
