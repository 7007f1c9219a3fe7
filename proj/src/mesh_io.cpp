#include "tcmom/mesh_io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include "tcmom/errors.hpp"

namespace tcmom {

namespace {
std::string fmt9(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.9g", v);
  return buf;
}
}  // namespace

void write_mesh(std::ostream& os, const TriangleMesh& mesh) {
  os << "mesh v1\n";
  os << mesh.vertex_count() << "\n";
  for (const auto& v : mesh.vertices)
    os << fmt9(v.x) << " " << fmt9(v.y) << " " << fmt9(v.z) << "\n";
  os << mesh.triangle_count() << "\n";
  for (const auto& t : mesh.triangles)
    os << t.v[0] << " " << t.v[1] << " " << t.v[2] << " " << t.tag << "\n";
  for (const auto& p : mesh.port_edges)
    os << "port " << p.port_id << " " << p.v0 << " " << p.v1 << "\n";
}

void write_mesh_file(const std::string& path, const TriangleMesh& mesh) {
  std::ofstream os(path, std::ios::binary);
  if (!os) fail(ErrorKind::IoError, "cannot open " + path + " for writing");
  write_mesh(os, mesh);
  if (!os) fail(ErrorKind::IoError, "write failed for " + path);
}

std::string mesh_to_string(const TriangleMesh& mesh) {
  std::ostringstream ss;
  write_mesh(ss, mesh);
  return ss.str();
}

TriangleMesh read_mesh(std::istream& is) {
  std::string header;
  std::getline(is, header);
  if (header != "mesh v1")
    fail(ErrorKind::IoError, "bad mesh header: '" + header + "'");
  int nv = 0;
  if (!(is >> nv) || nv < 0) fail(ErrorKind::IoError, "bad vertex count");
  TriangleMesh m;
  m.vertices.resize(nv);
  for (auto& v : m.vertices)
    if (!(is >> v.x >> v.y >> v.z))
      fail(ErrorKind::IoError, "truncated vertex list");
  int nt = 0;
  if (!(is >> nt) || nt < 0) fail(ErrorKind::IoError, "bad triangle count");
  m.triangles.resize(nt);
  for (auto& t : m.triangles)
    if (!(is >> t.v[0] >> t.v[1] >> t.v[2] >> t.tag))
      fail(ErrorKind::IoError, "truncated triangle list");
  std::string word;
  while (is >> word) {
    if (word != "port") fail(ErrorKind::IoError, "unexpected token: " + word);
    PortEdge p;
    if (!(is >> p.port_id >> p.v0 >> p.v1))
      fail(ErrorKind::IoError, "truncated port line");
    m.port_edges.push_back(p);
  }
  validate_mesh(m);
  return m;
}

TriangleMesh read_mesh_file(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) fail(ErrorKind::IoError, "cannot open " + path);
  return read_mesh(is);
}

}  // namespace tcmom
