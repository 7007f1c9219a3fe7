#pragma once

#include <iosfwd>
#include <string>

#include "tcmom/geometry.hpp"

namespace tcmom {

// Plain-text mesh format:
//   mesh v1
//   <vertex count>
//   x y z              (mm, 9 significant digits)
//   <triangle count>
//   i j k tag
//   port id v1 v2      (one line per port edge)
void write_mesh(std::ostream& os, const TriangleMesh& mesh);
void write_mesh_file(const std::string& path, const TriangleMesh& mesh);
std::string mesh_to_string(const TriangleMesh& mesh);

TriangleMesh read_mesh(std::istream& is);
TriangleMesh read_mesh_file(const std::string& path);

}  // namespace tcmom
