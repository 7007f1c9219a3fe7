#include <atomic>
#include <cmath>
#include <cstdlib>
#include <thread>
#include <vector>

#include "tcmom/constants.hpp"
#include "tcmom/errors.hpp"
#include "tcmom/mom.hpp"
#include "tcmom/potential.hpp"
#include "tcmom/quadrature.hpp"

namespace tcmom {
namespace {

constexpr double kInv4Pi = 1.0 / (4.0 * kPi);

// Rows per work unit. Fixed (never derived from the worker count) so the
// entry values are bit-identical no matter how many threads run.
constexpr int kChunkRows = 16;

// Smooth remainder (e^{-jkR} - 1)/(4 pi R); series below kR = 1e-3 to avoid
// the cos(x)-1 cancellation and the 0/0 at R = 0 (self-pair quadrature nodes).
inline Complex smooth_kernel(double k, double r) {
  const double x = k * r;
  if (x < 1e-3) {
    const double x2 = x * x;
    return {-0.5 * k * x * (1.0 - x2 / 12.0) * kInv4Pi,
            -k * (1.0 - x2 / 6.0) * kInv4Pi};
  }
  const double s = kInv4Pi / r;
  return {(std::cos(x) - 1.0) * s, -std::sin(x) * s};
}

inline Complex full_kernel(double k, double r) {
  const double x = k * r;
  const double s = kInv4Pi / r;
  return {std::cos(x) * s, -std::sin(x) * s};
}

// Double integrals of G over a triangle pair, reduced to the moments needed
// for every basis combination on that pair:
//   m00 = int int G, mr = int int r G, mrp = int int r' G,
//   sdot = int int (r . r') G
// so that int int (r-a).(r'-b) G = sdot - mr.b - a.mrp + (a.b) m00.
struct PairMoments {
  Complex m00{}, sdot{};
  std::array<Complex, 3> mr{}, mrp{};
};

struct TriData {
  Vec3 v0, v1, v2;  // meters
  Vec3 centroid;
  double radius = 0.0;  // max vertex distance from centroid
  std::array<int, 3> vid{};       // mesh vertex indices, for touch tests
  std::vector<QuadPoint> qp;      // base rule
  std::vector<QuadPoint> qp_obs;  // refined rule for touching-pair outer
};

// Structured meshes share vertices exactly, so index equality decides
// whether two triangles touch (share an edge or a corner).
inline bool touching(const TriData& a, const TriData& b) {
  for (int i : a.vid)
    for (int j : b.vid)
      if (i == j) return true;
  return false;
}

// One triangle's role in a basis function: its free vertex and the signed
// factor sign * len / area that multiplies the pair moments.
struct Role {
  int tri = -1;
  Vec3 free_v;
  double coef = 0.0;
};

void accumulate_outer(PairMoments& pm, const QuadPoint& op, const Complex& g0,
                      const Complex& grx, const Complex& gry,
                      const Complex& grz) {
  pm.m00 += op.w * g0;
  pm.mr[0] += (op.w * op.r.x) * g0;
  pm.mr[1] += (op.w * op.r.y) * g0;
  pm.mr[2] += (op.w * op.r.z) * g0;
  pm.mrp[0] += op.w * grx;
  pm.mrp[1] += op.w * gry;
  pm.mrp[2] += op.w * grz;
  pm.sdot += op.w * (op.r.x * grx + op.r.y * gry + op.r.z * grz);
}

// Near pair: analytic 1/R inner integral plus quadrature on the smooth
// remainder, accumulated with two separate outer rules.
//
// The smooth (oscillatory) part uses the base rule for every pair class:
// sampling one consistent rule everywhere makes the discrete R a Gram form
// of the positive-definite sin(kR)/R kernel, which is what keeps R
// numerically PSD far below the regularization shift.
//
// The static part feeds the reactance only, so its outer rule can be
// refined freely: touching pairs need it because the analytic inner
// potential has derivative kinks along shared edges and corners.
PairMoments pair_moments_near(const TriData& p, const TriData& q, double k) {
  PairMoments pm;
  for (const QuadPoint& op : p.qp) {
    Complex g0{}, grx{}, gry{}, grz{};
    for (const QuadPoint& iq : q.qp) {
      const Complex gs = smooth_kernel(k, (op.r - iq.r).norm()) * iq.w;
      g0 += gs;
      grx += gs * iq.r.x;
      gry += gs * iq.r.y;
      grz += gs * iq.r.z;
    }
    accumulate_outer(pm, op, g0, grx, gry, grz);
  }
  const std::vector<QuadPoint>& outer = touching(p, q) ? p.qp_obs : p.qp;
  for (const QuadPoint& op : outer) {
    const StaticPotentials sp = static_potentials(op.r, q.v0, q.v1, q.v2);
    const Vec3 grs = (sp.vec + sp.rho * sp.scalar) * kInv4Pi;
    accumulate_outer(pm, op, Complex(sp.scalar * kInv4Pi, 0.0),
                     Complex(grs.x, 0.0), Complex(grs.y, 0.0),
                     Complex(grs.z, 0.0));
  }
  return pm;
}

PairMoments pair_moments_far(const TriData& p, const TriData& q, double k) {
  PairMoments pm;
  for (const QuadPoint& op : p.qp) {
    Complex g0{}, grx{}, gry{}, grz{};
    for (const QuadPoint& iq : q.qp) {
      const Complex g = full_kernel(k, (op.r - iq.r).norm()) * iq.w;
      g0 += g;
      grx += g * iq.r.x;
      gry += g * iq.r.y;
      grz += g * iq.r.z;
    }
    accumulate_outer(pm, op, g0, grx, gry, grz);
  }
  return pm;
}

int assembly_workers() {
  if (const char* env = std::getenv("TCM_WORKERS")) {
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (end != env && v >= 1) return static_cast<int>(std::min(v, 256L));
  }
  const unsigned hc = std::thread::hardware_concurrency();
  return hc ? static_cast<int>(hc) : 1;
}

}  // namespace

ImpedanceMatrix assemble_impedance(const RwgBasisSet& basis, double freq_GHz,
                                   const AssemblyOptions& options) {
  if (!(freq_GHz > 0.0)) fail(ErrorKind::InvalidInput, "frequency must be > 0 GHz");
  if (basis.size() < 1) fail(ErrorKind::InvalidInput, "empty basis set");
  const TriangleMesh& mesh = *basis.mesh;
  const int n = basis.size();
  const int t_count = mesh.triangle_count();
  const double k = wavenumber_per_m(freq_GHz);

  std::vector<TriData> tris(t_count);
  for (int t = 0; t < t_count; ++t) {
    const Triangle& tr = mesh.triangles[t];
    TriData& td = tris[t];
    td.v0 = mesh.vertices[tr.v[0]] * kMmToM;
    td.v1 = mesh.vertices[tr.v[1]] * kMmToM;
    td.v2 = mesh.vertices[tr.v[2]] * kMmToM;
    td.centroid = (td.v0 + td.v1 + td.v2) * (1.0 / 3.0);
    td.radius = std::max({(td.v0 - td.centroid).norm(),
                          (td.v1 - td.centroid).norm(),
                          (td.v2 - td.centroid).norm()});
    td.vid = {tr.v[0], tr.v[1], tr.v[2]};
    td.qp = triangle_quadrature(td.v0, td.v1, td.v2, options.quad_subdiv);
    td.qp_obs =
        triangle_quadrature(td.v0, td.v1, td.v2, 2 * options.quad_subdiv);
  }

  std::vector<std::array<Role, 2>> roles(n);
  for (int m = 0; m < n; ++m) {
    const RwgFunction& f = basis.functions[m];
    const double len_m = f.edge_len_mm * kMmToM;
    roles[m][0] = {f.tri_plus, mesh.vertices[f.free_plus] * kMmToM,
                   +len_m / (f.area_plus_mm2 * kMmToM * kMmToM)};
    roles[m][1] = {f.tri_minus, mesh.vertices[f.free_minus] * kMmToM,
                   -len_m / (f.area_minus_mm2 * kMmToM * kMmToM)};
  }

  Eigen::MatrixXcd z(n, n);
  const int n_chunks = (n + kChunkRows - 1) / kChunkRows;
  std::atomic<int> next_chunk{0};

  auto run_chunks = [&]() {
    std::vector<PairMoments> moments;
    for (;;) {
      const int c = next_chunk.fetch_add(1);
      if (c >= n_chunks) break;
      const int r0 = c * kChunkRows;
      const int r1 = std::min(n, r0 + kChunkRows);

      // Distinct observation triangles touched by this chunk's rows.
      std::vector<int> obs;
      obs.reserve(2 * (r1 - r0));
      for (int m = r0; m < r1; ++m)
        for (const Role& role : roles[m])
          if (std::find(obs.begin(), obs.end(), role.tri) == obs.end())
            obs.push_back(role.tri);

      moments.resize(obs.size() * static_cast<size_t>(t_count));
      for (size_t s = 0; s < obs.size(); ++s) {
        const TriData& tp = tris[obs[s]];
        PairMoments* row = moments.data() + s * t_count;
        for (int q = 0; q < t_count; ++q) {
          const TriData& tq = tris[q];
          const double gap = (tp.centroid - tq.centroid).norm();
          row[q] = gap <= options.near_factor * (tp.radius + tq.radius)
                       ? pair_moments_near(tp, tq, k)
                       : pair_moments_far(tp, tq, k);
        }
      }

      for (int m = r0; m < r1; ++m) {
        const PairMoments* mom[2];
        for (int i = 0; i < 2; ++i) {
          const size_t s = static_cast<size_t>(
              std::find(obs.begin(), obs.end(), roles[m][i].tri) - obs.begin());
          mom[i] = moments.data() + s * t_count;
        }
        for (int col = 0; col < n; ++col) {
          Complex acc{};
          for (int i = 0; i < 2; ++i) {
            const Role& rm = roles[m][i];
            for (int j = 0; j < 2; ++j) {
              const Role& rn = roles[col][j];
              const PairMoments& pm = mom[i][rn.tri];
              const Vec3& a = rm.free_v;
              const Vec3& b = rn.free_v;
              const Complex k1 =
                  pm.sdot -
                  (pm.mr[0] * b.x + pm.mr[1] * b.y + pm.mr[2] * b.z) -
                  (pm.mrp[0] * a.x + pm.mrp[1] * a.y + pm.mrp[2] * a.z) +
                  dot(a, b) * pm.m00;
              acc += (rm.coef * rn.coef) * ((0.25 * k) * k1 - pm.m00 / k);
            }
          }
          z(m, col) = Complex(0.0, kEta0_ohm) * acc;
        }
      }
    }
  };

  const int workers = std::min(assembly_workers(), n_chunks);
  if (workers <= 1) {
    run_chunks();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (int w = 0; w < workers; ++w) pool.emplace_back(run_chunks);
    for (std::thread& th : pool) th.join();
  }

  ImpedanceMatrix zm;
  zm.freq_GHz = freq_GHz;
  zm.Z = 0.5 * (z + z.transpose());
  zm.basis = &basis;
  return zm;
}

ImpedanceMatrix assemble_impedance(const RwgBasisSet& basis, double freq_GHz) {
  return assemble_impedance(basis, freq_GHz, AssemblyOptions{});
}

}  // namespace tcmom
