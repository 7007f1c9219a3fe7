#include "tcmom/rwg.hpp"

#include <algorithm>
#include <map>

#include "tcmom/errors.hpp"

namespace tcmom {

RwgBasisSet extract_rwg(const TriangleMesh& mesh) {
  validate_mesh(mesh);

  struct EdgeInfo {
    int tri[2] = {-1, -1};
    int free_vertex[2] = {-1, -1};
    int count = 0;
  };
  std::map<std::pair<int, int>, EdgeInfo> edges;
  for (int t = 0; t < mesh.triangle_count(); ++t) {
    const auto& tr = mesh.triangles[t];
    for (int k = 0; k < 3; ++k) {
      const int a = tr.v[k], b = tr.v[(k + 1) % 3], c = tr.v[(k + 2) % 3];
      auto key = a < b ? std::make_pair(a, b) : std::make_pair(b, a);
      auto& e = edges[key];
      if (e.count < 2) {
        e.tri[e.count] = t;
        e.free_vertex[e.count] = c;
      }
      e.count++;
    }
  }

  RwgBasisSet basis;
  basis.mesh = std::make_shared<const TriangleMesh>(mesh);
  for (const auto& [key, e] : edges) {
    if (e.count != 2) continue;
    RwgFunction f;
    f.v0 = key.first;
    f.v1 = key.second;
    // Plus triangle = lower index; map iteration already visited it first.
    const int p = e.tri[0] < e.tri[1] ? 0 : 1;
    f.tri_plus = e.tri[p];
    f.tri_minus = e.tri[1 - p];
    f.free_plus = e.free_vertex[p];
    f.free_minus = e.free_vertex[1 - p];
    f.edge_len_mm = (mesh.vertices[f.v1] - mesh.vertices[f.v0]).norm();
    f.area_plus_mm2 = mesh.area(f.tri_plus);
    f.area_minus_mm2 = mesh.area(f.tri_minus);
    basis.functions.push_back(f);
  }
  if (basis.functions.empty())
    fail(ErrorKind::UnsolvableMesh, "mesh has no interior edges");

  for (const auto& p : mesh.port_edges) {
    const auto key = p.v0 < p.v1 ? std::make_pair(p.v0, p.v1)
                                 : std::make_pair(p.v1, p.v0);
    int idx = -1;
    for (int n = 0; n < basis.size(); ++n)
      if (basis.functions[n].v0 == key.first &&
          basis.functions[n].v1 == key.second) {
        idx = n;
        break;
      }
    if (idx < 0)
      fail(ErrorKind::InvalidPort, "port edge lost during basis extraction");
    basis.port_basis.push_back(idx);
  }
  return basis;
}

bool is_chassis_basis(const TriangleMesh& mesh, const RwgFunction& f) {
  return mesh.triangles[f.tri_plus].tag == kRegionChassis &&
         mesh.triangles[f.tri_minus].tag == kRegionChassis;
}

}  // namespace tcmom
