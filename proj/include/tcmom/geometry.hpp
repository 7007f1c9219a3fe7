#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <string>
#include <utility>
#include <vector>

namespace tcmom {

struct Vec3 {
  double x = 0.0, y = 0.0, z = 0.0;

  Vec3 operator+(const Vec3& o) const { return {x + o.x, y + o.y, z + o.z}; }
  Vec3 operator-(const Vec3& o) const { return {x - o.x, y - o.y, z - o.z}; }
  Vec3 operator*(double s) const { return {x * s, y * s, z * s}; }
  double dot(const Vec3& o) const { return x * o.x + y * o.y + z * o.z; }
  Vec3 cross(const Vec3& o) const {
    return {y * o.z - z * o.y, z * o.x - x * o.z, x * o.y - y * o.x};
  }
  double norm() const;
};

inline double dot(const Vec3& a, const Vec3& b) { return a.dot(b); }
inline Vec3 cross(const Vec3& a, const Vec3& b) { return a.cross(b); }

// Per-triangle region labels. 0 = chassis, k >= 1 = element k, -1 = other.
constexpr int kRegionChassis = 0;
constexpr int kRegionOther = -1;
inline int region_element(int port_id) { return port_id; }

struct Triangle {
  std::array<int, 3> v;
  int tag = kRegionChassis;
};

struct PortEdge {
  int port_id = 0;
  int v0 = -1, v1 = -1;  // mesh vertex indices of the gap edge
};

// Conducting surface: vertices (mm), triangles, tagged port edges.
// Value type; all mutation happens through the builder functions below.
struct TriangleMesh {
  std::vector<Vec3> vertices;
  std::vector<Triangle> triangles;
  std::vector<PortEdge> port_edges;

  int vertex_count() const { return static_cast<int>(vertices.size()); }
  int triangle_count() const { return static_cast<int>(triangles.size()); }
  int port_count() const { return static_cast<int>(port_edges.size()); }

  Vec3 centroid(int t) const {
    const auto& tr = triangles[t];
    return (vertices[tr.v[0]] + vertices[tr.v[1]] + vertices[tr.v[2]]) *
           (1.0 / 3.0);
  }
  double area(int t) const;
};

struct SlotRect {
  double center_x_mm = 0.0, center_y_mm = 0.0;
  double length_mm = 0.0;  // extent along x
  double width_mm = 0.0;   // extent along y

  bool operator==(const SlotRect&) const = default;
};

// One axis-aligned strip element. The path is the strip centerline; segments
// must be horizontal or vertical and snapped to the scene grid. `feed_segment`
// selects the segment carrying the delta-gap port; the gap sits on the strip
// cross-edge nearest `feed_offset_mm` from that segment's start.
struct LoopElementSpec {
  std::vector<std::pair<double, double>> path_mm;
  double width_mm = 0.0;
  int feed_segment = 0;
  double feed_offset_mm = 0.0;
  bool has_short = false;  // informational; welding is geometric
};

struct MeshStats {
  int vertices = 0;
  int triangles = 0;
  int edges = 0;
  int interior_edges = 0;
  int boundary_edges = 0;
  int holes = 0;  // from Euler characteristic, V - E + F = 1 - holes
};

// Structured-grid plate: cells of size <= max_edge_mm, each split in two.
// Plate corner at the origin, x along length, y along width, z = 0.
TriangleMesh build_rect_plate(double length_mm, double width_mm,
                              double max_edge_mm);

// Remove plate triangles whose centroid falls inside the slot after snapping
// its bounds to the nearest mesh lines. Vertex set is compacted.
TriangleMesh cut_rect_slot(const TriangleMesh& mesh, const SlotRect& slot);

// Mesh a strip element into grid cells and weld it onto the board wherever
// vertices coincide (within 1e-6 mm). Registers the feed edge under port_id.
TriangleMesh add_strip_loop(const TriangleMesh& board,
                            const LoopElementSpec& spec, int port_id,
                            double cell_mm);

// Register a delta-gap port on an existing interior edge (used by plate-fed
// scenes such as the strip dipole).
TriangleMesh add_port_on_edge(const TriangleMesh& mesh, const Vec3& a,
                              const Vec3& b, int port_id);

// Structural checks: index ranges, degenerate triangles, conformity,
// duplicate vertices, port edges interior. Throws on violation.
void validate_mesh(const TriangleMesh& mesh);

// Direct edge census (the independent oracle for RWG counts and Euler checks).
MeshStats census(const TriangleMesh& mesh);

// Bounding box over triangles with a given region tag (all if tag omitted).
struct BBox {
  double xmin = 0, xmax = 0, ymin = 0, ymax = 0;
  bool empty = true;
};
BBox region_bbox(const TriangleMesh& mesh, int tag);

bool meshes_identical(const TriangleMesh& a, const TriangleMesh& b);

}  // namespace tcmom
