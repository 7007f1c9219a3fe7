#include "tcmom/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <set>
#include <tuple>

#include "tcmom/errors.hpp"

namespace tcmom {

namespace {

constexpr double kWeldTol_mm = 1e-6;
constexpr double kMinArea_mm2 = 1e-9;

// Vertex dedup with tolerance. Quantizes to a fine grid and checks the
// 27 neighbor cells so points straddling a cell boundary still merge.
class VertexPool {
 public:
  int intern(const Vec3& p) {
    const auto key = quantize(p);
    for (int dx = -1; dx <= 1; ++dx)
      for (int dy = -1; dy <= 1; ++dy)
        for (int dz = -1; dz <= 1; ++dz) {
          auto it = index_.find({std::get<0>(key) + dx, std::get<1>(key) + dy,
                                 std::get<2>(key) + dz});
          if (it == index_.end()) continue;
          for (int idx : it->second) {
            const Vec3 d = points_[idx] - p;
            if (std::abs(d.x) <= kWeldTol_mm && std::abs(d.y) <= kWeldTol_mm &&
                std::abs(d.z) <= kWeldTol_mm)
              return idx;
          }
        }
    const int idx = static_cast<int>(points_.size());
    points_.push_back(p);
    index_[key].push_back(idx);
    return idx;
  }

  const std::vector<Vec3>& points() const { return points_; }

 private:
  using Key = std::tuple<long long, long long, long long>;
  static Key quantize(const Vec3& p) {
    const double q = 4.0 * kWeldTol_mm;
    return {static_cast<long long>(std::floor(p.x / q)),
            static_cast<long long>(std::floor(p.y / q)),
            static_cast<long long>(std::floor(p.z / q))};
  }
  std::vector<Vec3> points_;
  std::map<Key, std::vector<int>> index_;
};

std::pair<int, int> sorted_edge(int a, int b) {
  return a < b ? std::make_pair(a, b) : std::make_pair(b, a);
}

// Cells are split along the (i,j)-(i+1,j+1) diagonal; both triangles CCW
// about +z.
void emit_cell(std::vector<Triangle>& tris, int v00, int v10, int v11, int v01,
               int tag) {
  tris.push_back({{v00, v10, v11}, tag});
  tris.push_back({{v00, v11, v01}, tag});
}

}  // namespace

double Vec3::norm() const { return std::sqrt(x * x + y * y + z * z); }

double TriangleMesh::area(int t) const {
  const auto& tr = triangles[t];
  const Vec3 e1 = vertices[tr.v[1]] - vertices[tr.v[0]];
  const Vec3 e2 = vertices[tr.v[2]] - vertices[tr.v[0]];
  return 0.5 * e1.cross(e2).norm();
}

TriangleMesh build_rect_plate(double length_mm, double width_mm,
                              double max_edge_mm) {
  if (length_mm <= 0 || width_mm <= 0 || max_edge_mm <= 0)
    fail(ErrorKind::InvalidGeometry, "plate dimensions must be positive");
  if (max_edge_mm > std::min(length_mm, width_mm))
    fail(ErrorKind::InvalidGeometry,
         "max_edge_mm exceeds the smaller plate dimension");

  const int nx = static_cast<int>(std::ceil(length_mm / max_edge_mm - 1e-12));
  const int ny = static_cast<int>(std::ceil(width_mm / max_edge_mm - 1e-12));
  const double dx = length_mm / nx;
  const double dy = width_mm / ny;

  TriangleMesh m;
  m.vertices.reserve(static_cast<size_t>(nx + 1) * (ny + 1));
  for (int j = 0; j <= ny; ++j)
    for (int i = 0; i <= nx; ++i)
      m.vertices.push_back({i * dx, j * dy, 0.0});

  const auto vid = [nx](int i, int j) { return j * (nx + 1) + i; };
  for (int j = 0; j < ny; ++j)
    for (int i = 0; i < nx; ++i)
      emit_cell(m.triangles, vid(i, j), vid(i + 1, j), vid(i + 1, j + 1),
                vid(i, j + 1), kRegionChassis);
  return m;
}

TriangleMesh cut_rect_slot(const TriangleMesh& mesh, const SlotRect& slot) {
  if (slot.length_mm <= 0 || slot.width_mm <= 0)
    fail(ErrorKind::InvalidGeometry, "slot dimensions must be positive");

  const BBox plate = region_bbox(mesh, kRegionChassis);
  if (plate.empty) fail(ErrorKind::EmptyMesh, "no chassis region to cut");

  const double x0 = slot.center_x_mm - 0.5 * slot.length_mm;
  const double x1 = slot.center_x_mm + 0.5 * slot.length_mm;
  const double y0 = slot.center_y_mm - 0.5 * slot.width_mm;
  const double y1 = slot.center_y_mm + 0.5 * slot.width_mm;
  if (x0 <= plate.xmin || x1 >= plate.xmax || y0 <= plate.ymin ||
      y1 >= plate.ymax)
    fail(ErrorKind::InvalidGeometry,
         "slot must lie strictly inside the plate boundary");

  // Snap each slot bound to the nearest chassis mesh line.
  std::set<double> xs, ys;
  for (const auto& t : mesh.triangles) {
    if (t.tag != kRegionChassis) continue;
    for (int k = 0; k < 3; ++k) {
      xs.insert(mesh.vertices[t.v[k]].x);
      ys.insert(mesh.vertices[t.v[k]].y);
    }
  }
  const auto snap = [](const std::set<double>& lines, double v) {
    double best = *lines.begin();
    for (double c : lines)
      if (std::abs(c - v) < std::abs(best - v)) best = c;
    return best;
  };
  const double sx0 = snap(xs, x0), sx1 = snap(xs, x1);
  const double sy0 = snap(ys, y0), sy1 = snap(ys, y1);
  if (sx1 - sx0 < kWeldTol_mm || sy1 - sy0 < kWeldTol_mm)
    fail(ErrorKind::InvalidGeometry,
         "slot narrower than one mesh cell after snapping");

  TriangleMesh out;
  std::vector<int> removed_ports;
  std::vector<Triangle> kept;
  for (int t = 0; t < mesh.triangle_count(); ++t) {
    const Vec3 c = mesh.centroid(t);
    const bool inside = mesh.triangles[t].tag == kRegionChassis &&
                        c.x > sx0 && c.x < sx1 && c.y > sy0 && c.y < sy1;
    if (!inside) kept.push_back(mesh.triangles[t]);
  }
  if (kept.empty()) fail(ErrorKind::EmptyMesh, "slot removes the whole mesh");
  if (kept.size() == mesh.triangles.size())
    fail(ErrorKind::InvalidGeometry, "slot removes no triangles");

  // Compact the vertex set, preserving order.
  std::vector<int> remap(mesh.vertices.size(), -1);
  for (const auto& t : kept)
    for (int k = 0; k < 3; ++k) remap[t.v[k]] = 0;
  int next = 0;
  for (size_t i = 0; i < remap.size(); ++i)
    if (remap[i] == 0) {
      remap[i] = next++;
      out.vertices.push_back(mesh.vertices[i]);
    }
  for (auto t : kept) {
    for (int k = 0; k < 3; ++k) t.v[k] = remap[t.v[k]];
    out.triangles.push_back(t);
  }
  for (const auto& p : mesh.port_edges) {
    if (remap[p.v0] < 0 || remap[p.v1] < 0)
      fail(ErrorKind::PortDestroyed,
           "slot removes the edge of port " + std::to_string(p.port_id));
    out.port_edges.push_back({p.port_id, remap[p.v0], remap[p.v1]});
  }
  validate_mesh(out);
  // Port edges must still be interior (a cut can strand them on a rim).
  {
    std::map<std::pair<int, int>, int> edge_use;
    for (const auto& t : out.triangles)
      for (int k = 0; k < 3; ++k)
        edge_use[sorted_edge(t.v[k], t.v[(k + 1) % 3])]++;
    for (const auto& p : out.port_edges)
      if (edge_use[sorted_edge(p.v0, p.v1)] != 2)
        fail(ErrorKind::PortDestroyed,
             "slot strands the edge of port " + std::to_string(p.port_id) +
                 " on a boundary");
  }
  return out;
}

TriangleMesh add_strip_loop(const TriangleMesh& board,
                            const LoopElementSpec& spec, int port_id,
                            double cell_mm) {
  if (spec.path_mm.size() < 2)
    fail(ErrorKind::InvalidGeometry, "strip path needs at least two points");
  if (cell_mm <= 0) fail(ErrorKind::InvalidGeometry, "cell size must be positive");
  if (spec.width_mm < cell_mm - 1e-9)
    fail(ErrorKind::InvalidGeometry, "strip width below one mesh cell");
  if (spec.feed_segment < 0 ||
      spec.feed_segment + 1 >= static_cast<int>(spec.path_mm.size()))
    fail(ErrorKind::InvalidGeometry, "feed segment index out of range");

  const int rows = std::max(1, static_cast<int>(std::lround(spec.width_mm / cell_mm)));
  const double g = cell_mm;

  // Rasterize the centerline onto the global grid (cells of the infinite
  // grid anchored at the board origin). Each segment must be axis-aligned.
  struct Cell {
    long long i, j;
    bool operator<(const Cell& o) const {
      return i != o.i ? i < o.i : j < o.j;
    }
  };
  std::set<Cell> cells;
  std::vector<std::vector<Cell>> segment_cells;  // per path segment, ordered

  for (size_t s = 0; s + 1 < spec.path_mm.size(); ++s) {
    const auto [ax, ay] = spec.path_mm[s];
    const auto [bx, by] = spec.path_mm[s + 1];
    const bool horiz = std::abs(ay - by) < 1e-9;
    const bool vert = std::abs(ax - bx) < 1e-9;
    if (horiz == vert)
      fail(ErrorKind::InvalidGeometry,
           "strip path segments must be axis-aligned");
    std::vector<Cell> seg;
    if (horiz) {
      // Transverse rows are centered on the segment line.
      const long long j0 =
          static_cast<long long>(std::llround(ay / g - 0.5 * rows));
      const double lo = std::min(ax, bx), hi = std::max(ax, bx);
      const long long i0 = static_cast<long long>(std::llround(lo / g));
      const long long i1 = static_cast<long long>(std::llround(hi / g));
      if (i1 <= i0)
        fail(ErrorKind::InvalidGeometry, "strip segment shorter than one cell");
      const bool fwd = ax <= bx;
      for (long long step = 0; step < i1 - i0; ++step) {
        const long long i = fwd ? i0 + step : i1 - 1 - step;
        for (int r = 0; r < rows; ++r) seg.push_back({i, j0 + r});
      }
    } else {
      const long long i0 =
          static_cast<long long>(std::llround(ax / g - 0.5 * rows));
      const double lo = std::min(ay, by), hi = std::max(ay, by);
      const long long j0 = static_cast<long long>(std::llround(lo / g));
      const long long j1 = static_cast<long long>(std::llround(hi / g));
      if (j1 <= j0)
        fail(ErrorKind::InvalidGeometry, "strip segment shorter than one cell");
      const bool fwd = ay <= by;
      for (long long step = 0; step < j1 - j0; ++step) {
        const long long j = fwd ? j0 + step : j1 - 1 - step;
        for (int r = 0; r < rows; ++r) seg.push_back({i0 + r, j});
      }
    }
    segment_cells.push_back(seg);
    for (const auto& c : seg) cells.insert(c);
  }

  // Self-intersection guard: a cell visited by two non-adjacent segments.
  for (size_t a = 0; a + 2 < segment_cells.size(); ++a)
    for (size_t b = a + 2; b < segment_cells.size(); ++b)
      for (const auto& ca : segment_cells[a])
        for (const auto& cb : segment_cells[b])
          if (!(ca < cb) && !(cb < ca))
            fail(ErrorKind::InvalidGeometry, "strip path self-intersects");

  // Overlap with existing metal: compare against occupied cells of the board.
  std::set<Cell> occupied;
  for (int t = 0; t < board.triangle_count(); ++t) {
    const Vec3 c = board.centroid(t);
    occupied.insert({static_cast<long long>(std::floor(c.x / g)),
                     static_cast<long long>(std::floor(c.y / g))});
  }
  for (const auto& c : cells)
    if (occupied.count(c))
      fail(ErrorKind::InvalidGeometry,
           "strip footprint overlaps existing metal for port " +
               std::to_string(port_id));

  // Build: board vertices first (indices preserved), then strip cells.
  TriangleMesh out;
  VertexPool pool;
  for (const auto& v : board.vertices) pool.intern(v);
  out.triangles = board.triangles;
  out.port_edges = board.port_edges;

  const int tag = region_element(port_id);
  for (const auto& c : cells) {
    const double x0 = c.i * g, y0 = c.j * g;
    const int v00 = pool.intern({x0, y0, 0.0});
    const int v10 = pool.intern({x0 + g, y0, 0.0});
    const int v11 = pool.intern({x0 + g, y0 + g, 0.0});
    const int v01 = pool.intern({x0, y0 + g, 0.0});
    emit_cell(out.triangles, v00, v10, v11, v01, tag);
  }
  out.vertices = pool.points();

  // Feed edge: the strip cross-edge nearest feed_offset_mm along the chosen
  // segment. Offset 0 selects the junction line at the segment start.
  {
    const auto [ax, ay] = spec.path_mm[spec.feed_segment];
    const auto [bx, by] = spec.path_mm[spec.feed_segment + 1];
    const bool horiz = std::abs(ay - by) < 1e-9;
    const double len = horiz ? std::abs(bx - ax) : std::abs(by - ay);
    double off = spec.feed_offset_mm;
    if (off < 0 || off > len)
      fail(ErrorKind::InvalidGeometry, "feed offset outside its segment");
    const double dir = horiz ? (bx >= ax ? 1.0 : -1.0) : (by >= ay ? 1.0 : -1.0);
    Vec3 pa, pb;  // endpoints of the cross mesh line carrying the gap
    if (horiz) {
      const double x = (std::llround(ax / g) + dir * std::llround(off / g)) * g;
      const long long j0 =
          static_cast<long long>(std::llround(ay / g - 0.5 * rows));
      pa = {x, j0 * g, 0.0};
      pb = {x, (j0 + rows) * g, 0.0};
    } else {
      const double y = (std::llround(ay / g) + dir * std::llround(off / g)) * g;
      const long long i0 =
          static_cast<long long>(std::llround(ax / g - 0.5 * rows));
      pa = {i0 * g, y, 0.0};
      pb = {(i0 + rows) * g, y, 0.0};
    }
    // With multi-row strips the cross line has several colinear edges; the
    // delta gap sits on the first of them.
    const Vec3 step = (pb - pa) * (1.0 / rows);
    const Vec3 e0 = pa;
    const Vec3 e1 = pa + step;
    out = add_port_on_edge(out, e0, e1, port_id);
  }
  validate_mesh(out);
  return out;
}

TriangleMesh add_port_on_edge(const TriangleMesh& mesh, const Vec3& a,
                              const Vec3& b, int port_id) {
  int ia = -1, ib = -1;
  for (int i = 0; i < mesh.vertex_count(); ++i) {
    const Vec3 da = mesh.vertices[i] - a;
    const Vec3 db = mesh.vertices[i] - b;
    if (da.norm() <= kWeldTol_mm) ia = i;
    if (db.norm() <= kWeldTol_mm) ib = i;
  }
  if (ia < 0 || ib < 0 || ia == ib)
    fail(ErrorKind::PortUnrealizable,
         "feed edge endpoints not found in mesh for port " +
             std::to_string(port_id));
  int use = 0;
  for (const auto& t : mesh.triangles)
    for (int k = 0; k < 3; ++k) {
      const auto e = sorted_edge(t.v[k], t.v[(k + 1) % 3]);
      if (e == sorted_edge(ia, ib)) ++use;
    }
  if (use != 2)
    fail(ErrorKind::PortUnrealizable,
         "feed edge of port " + std::to_string(port_id) +
             " is not interior (shared by " + std::to_string(use) +
             " triangles)");
  for (const auto& p : mesh.port_edges)
    if (sorted_edge(p.v0, p.v1) == sorted_edge(ia, ib))
      fail(ErrorKind::InvalidGeometry, "edge already carries a port");
  TriangleMesh out = mesh;
  out.port_edges.push_back({port_id, ia, ib});
  return out;
}

void validate_mesh(const TriangleMesh& mesh) {
  const int nv = mesh.vertex_count();
  if (mesh.triangles.empty()) fail(ErrorKind::EmptyMesh, "mesh has no triangles");
  for (const auto& t : mesh.triangles)
    for (int k = 0; k < 3; ++k)
      if (t.v[k] < 0 || t.v[k] >= nv)
        fail(ErrorKind::InvalidGeometry, "triangle index out of range");
  for (int t = 0; t < mesh.triangle_count(); ++t)
    if (mesh.area(t) <= kMinArea_mm2)
      fail(ErrorKind::InvalidGeometry,
           "degenerate triangle " + std::to_string(t));

  std::map<std::pair<int, int>, int> edge_use;
  for (const auto& t : mesh.triangles) {
    if (t.v[0] == t.v[1] || t.v[1] == t.v[2] || t.v[0] == t.v[2])
      fail(ErrorKind::InvalidGeometry, "triangle repeats a vertex");
    for (int k = 0; k < 3; ++k)
      edge_use[sorted_edge(t.v[k], t.v[(k + 1) % 3])]++;
  }
  for (const auto& [e, n] : edge_use)
    if (n > 2)
      fail(ErrorKind::InvalidGeometry,
           "non-conforming edge shared by " + std::to_string(n) + " triangles");

  for (const auto& p : mesh.port_edges) {
    if (p.v0 < 0 || p.v0 >= nv || p.v1 < 0 || p.v1 >= nv)
      fail(ErrorKind::InvalidPort, "port edge index out of range");
    auto it = edge_use.find(sorted_edge(p.v0, p.v1));
    if (it == edge_use.end() || it->second != 2)
      fail(ErrorKind::InvalidPort,
           "port " + std::to_string(p.port_id) + " edge is not interior");
  }

  // Duplicate-vertex scan via sorted order; O(n log n).
  std::vector<int> order(nv);
  for (int i = 0; i < nv; ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](int a, int b) {
    const auto& p = mesh.vertices[a];
    const auto& q = mesh.vertices[b];
    if (p.x != q.x) return p.x < q.x;
    if (p.y != q.y) return p.y < q.y;
    return p.z < q.z;
  });
  for (int i = 0; i + 1 < nv; ++i) {
    // compare against subsequent vertices with near-equal x
    for (int j = i + 1; j < nv; ++j) {
      const Vec3 d = mesh.vertices[order[j]] - mesh.vertices[order[i]];
      if (d.x > kWeldTol_mm) break;
      if (std::abs(d.y) <= kWeldTol_mm && std::abs(d.z) <= kWeldTol_mm &&
          std::abs(d.x) <= kWeldTol_mm)
        fail(ErrorKind::InvalidGeometry, "duplicate vertices within 1e-6 mm");
    }
  }
}

MeshStats census(const TriangleMesh& mesh) {
  MeshStats s;
  s.vertices = mesh.vertex_count();
  s.triangles = mesh.triangle_count();
  std::map<std::pair<int, int>, int> edge_use;
  for (const auto& t : mesh.triangles)
    for (int k = 0; k < 3; ++k)
      edge_use[sorted_edge(t.v[k], t.v[(k + 1) % 3])]++;
  s.edges = static_cast<int>(edge_use.size());
  for (const auto& [e, n] : edge_use)
    (n == 2 ? s.interior_edges : s.boundary_edges)++;
  // Open disk with h holes: V - E + F = 1 - h.
  s.holes = 1 - (s.vertices - s.edges + s.triangles);
  return s;
}

BBox region_bbox(const TriangleMesh& mesh, int tag) {
  BBox b;
  for (const auto& t : mesh.triangles) {
    if (t.tag != tag) continue;
    for (int k = 0; k < 3; ++k) {
      const Vec3& v = mesh.vertices[t.v[k]];
      if (b.empty) {
        b = {v.x, v.x, v.y, v.y, false};
      } else {
        b.xmin = std::min(b.xmin, v.x);
        b.xmax = std::max(b.xmax, v.x);
        b.ymin = std::min(b.ymin, v.y);
        b.ymax = std::max(b.ymax, v.y);
      }
    }
  }
  return b;
}

bool meshes_identical(const TriangleMesh& a, const TriangleMesh& b) {
  if (a.vertices.size() != b.vertices.size() ||
      a.triangles.size() != b.triangles.size() ||
      a.port_edges.size() != b.port_edges.size())
    return false;
  for (size_t i = 0; i < a.vertices.size(); ++i) {
    if (a.vertices[i].x != b.vertices[i].x ||
        a.vertices[i].y != b.vertices[i].y ||
        a.vertices[i].z != b.vertices[i].z)
      return false;
  }
  for (size_t i = 0; i < a.triangles.size(); ++i)
    if (a.triangles[i].v != b.triangles[i].v ||
        a.triangles[i].tag != b.triangles[i].tag)
      return false;
  for (size_t i = 0; i < a.port_edges.size(); ++i)
    if (a.port_edges[i].port_id != b.port_edges[i].port_id ||
        a.port_edges[i].v0 != b.port_edges[i].v0 ||
        a.port_edges[i].v1 != b.port_edges[i].v1)
      return false;
  return true;
}

}  // namespace tcmom
