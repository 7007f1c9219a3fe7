#pragma once

#include <memory>
#include <vector>

#include "tcmom/geometry.hpp"

namespace tcmom {

// One edge-based basis function: interior edge shared by a plus and a minus
// triangle. The plus triangle is the one with the lower triangle index.
struct RwgFunction {
  int v0 = -1, v1 = -1;        // edge vertices, v0 < v1
  int tri_plus = -1;           // lower triangle index
  int tri_minus = -1;
  int free_plus = -1;          // free (opposite) vertex in each triangle
  int free_minus = -1;
  double edge_len_mm = 0.0;
  double area_plus_mm2 = 0.0;
  double area_minus_mm2 = 0.0;
};

struct RwgBasisSet {
  // Owning snapshot of the mesh the bases were built from, so a basis set
  // (and anything holding one) never outlives its geometry.
  std::shared_ptr<const TriangleMesh> mesh;
  std::vector<RwgFunction> functions;
  std::vector<int> port_basis;  // basis index per mesh.port_edges entry

  int size() const { return static_cast<int>(functions.size()); }
};

// One basis function per interior edge, ordered by sorted (v0, v1) pair.
// Throws unsolvable-mesh when no interior edge exists.
RwgBasisSet extract_rwg(const TriangleMesh& mesh);

// True if both triangles of the basis function carry the chassis tag.
bool is_chassis_basis(const TriangleMesh& mesh, const RwgFunction& f);

}  // namespace tcmom
