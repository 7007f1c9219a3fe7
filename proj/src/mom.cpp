#include <algorithm>
#include <cstdint>
#include <cstdio>
#include <cstring>
#include <fstream>

#include "tcmom/constants.hpp"
#include "tcmom/errors.hpp"
#include "tcmom/mom.hpp"

namespace tcmom {
namespace {

std::string fmt_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.3e", v);
  return buf;
}

}  // namespace

ReactanceSplit split_reactance(const ImpedanceMatrix& zm) {
  ReactanceSplit out;
  out.R = zm.Z.real();
  out.X = zm.Z.imag();
  const int n = static_cast<int>(out.R.rows());
  // Negative eigenvalues of R beyond the noise floor are detected by a
  // shifted Cholesky: R + tau I is PD exactly when min eig(R) > -tau.
  const double tau = 1e-8 * out.R.trace() / std::max(n, 1);
  if (!(tau > 0.0)) {
    out.r_flagged = true;
    return out;
  }
  Eigen::MatrixXd shifted = out.R;
  shifted.diagonal().array() += tau;
  out.r_flagged = Eigen::LLT<Eigen::MatrixXd>(shifted).info() != Eigen::Success;
  return out;
}

std::vector<PortSpec> make_ports(const RwgBasisSet& basis, double z0_ohm) {
  std::vector<PortSpec> ports;
  ports.reserve(basis.port_basis.size());
  for (size_t i = 0; i < basis.port_basis.size(); ++i) {
    const int bi = basis.port_basis[i];
    PortSpec p;
    p.port_id = basis.mesh->port_edges[i].port_id;
    p.basis_index = bi;
    p.edge_len_m = basis.functions[bi].edge_len_mm * kMmToM;
    p.z0_ohm = z0_ohm;
    ports.push_back(p);
  }
  return ports;
}

Eigen::VectorXcd excitation_vector(const RwgBasisSet& basis,
                                   const PortSpec& port, double volts) {
  if (port.basis_index < 0 || port.basis_index >= basis.size())
    fail(ErrorKind::InvalidPort,
         "feed basis index " + std::to_string(port.basis_index) +
             " out of range for N=" + std::to_string(basis.size()));
  Eigen::VectorXcd v = Eigen::VectorXcd::Zero(basis.size());
  const double len_m = basis.functions[port.basis_index].edge_len_mm * kMmToM;
  v[port.basis_index] = Complex(volts * len_m, 0.0);
  return v;
}

Eigen::VectorXcd driven_solve(const ImpedanceMatrix& zm,
                              const Eigen::VectorXcd& v) {
  if (zm.Z.rows() != zm.Z.cols() || zm.Z.rows() != v.size())
    fail(ErrorKind::InvalidInput, "excitation length does not match matrix");
  const double vnorm = v.norm();
  if (vnorm == 0.0) return Eigen::VectorXcd::Zero(v.size());

  Eigen::PartialPivLU<Eigen::MatrixXcd> lu(zm.Z);
  const double rcond = lu.rcond();
  if (!(rcond > 1e-14))
    fail(ErrorKind::SolverFailure,
         "matrix condition estimate " + fmt_double(1.0 / rcond) +
             " exceeds 1e14 at " + std::to_string(zm.freq_GHz) + " GHz");

  Eigen::VectorXcd x = lu.solve(v);
  x += lu.solve((v - zm.Z * x).eval());  // one refinement step
  const double rel = (v - zm.Z * x).norm() / vnorm;
  if (!(rel < 1e-10))
    fail(ErrorKind::SolverFailure,
         "driven-solve residual " + fmt_double(rel) + " misses 1e-10 at " +
             std::to_string(zm.freq_GHz) + " GHz");
  return x;
}

ScatteringMatrix scattering_matrix(const ImpedanceMatrix& zm,
                                   const std::vector<PortSpec>& ports) {
  if (ports.empty())
    fail(ErrorKind::InvalidInput, "scattering matrix requires >= 1 port");
  const int p_count = static_cast<int>(ports.size());
  for (const PortSpec& p : ports) {
    if (p.basis_index < 0 || p.basis_index >= zm.size())
      fail(ErrorKind::InvalidPort, "port " + std::to_string(p.port_id) +
                                       " has invalid feed basis index");
    if (!(p.z0_ohm > 0.0))
      fail(ErrorKind::InvalidPort, "port " + std::to_string(p.port_id) +
                                       " reference impedance must be > 0");
  }
  for (int a = 0; a < p_count; ++a)
    for (int b = a + 1; b < p_count; ++b)
      if (ports[a].basis_index == ports[b].basis_index)
        fail(ErrorKind::InvalidPort, "ports share a feed edge");

  // Port admittance from one unit-voltage drive per port; the current
  // through a delta gap is edge length x feed coefficient (the RWG normal
  // flux across its edge is uniform and unity).
  Eigen::MatrixXcd y(p_count, p_count);
  for (int q = 0; q < p_count; ++q) {
    Eigen::VectorXcd v = Eigen::VectorXcd::Zero(zm.size());
    v[ports[q].basis_index] = Complex(ports[q].edge_len_m, 0.0);
    const Eigen::VectorXcd i_coef = driven_solve(zm, v);
    for (int p = 0; p < p_count; ++p)
      y(p, q) = ports[p].edge_len_m * i_coef[ports[p].basis_index];
  }

  const Eigen::MatrixXcd z_port = y.inverse();
  Eigen::VectorXd sqrt_r(p_count);
  for (int p = 0; p < p_count; ++p) sqrt_r[p] = std::sqrt(ports[p].z0_ohm);

  Eigen::MatrixXcd num = z_port;
  Eigen::MatrixXcd den = z_port;
  for (int p = 0; p < p_count; ++p) {
    num(p, p) -= ports[p].z0_ohm;
    den(p, p) += ports[p].z0_ohm;
  }
  // Power-wave S = R0^{-1/2} (Zp - R0)(Zp + R0)^{-1} R0^{1/2}; symmetric for
  // symmetric Zp and real diagonal R0.
  Eigen::MatrixXcd s = num * den.inverse();
  for (int a = 0; a < p_count; ++a)
    for (int b = 0; b < p_count; ++b) s(a, b) *= sqrt_r[b] / sqrt_r[a];

  ScatteringMatrix out;
  out.freq_GHz = zm.freq_GHz;
  out.S = 0.5 * (s + s.transpose());  // strip last-digit asymmetry
  for (const PortSpec& p : ports) {
    out.port_ids.push_back(p.port_id);
    out.z_ref_ohm.push_back(p.z0_ohm);
  }
  return out;
}

SurfaceCurrent surface_current(const RwgBasisSet& basis,
                               const Eigen::VectorXcd& coeffs) {
  if (coeffs.size() != basis.size())
    fail(ErrorKind::InvalidInput, "coefficient length does not match basis");
  const TriangleMesh& mesh = *basis.mesh;
  SurfaceCurrent out;
  out.vec.assign(mesh.triangle_count(), {Complex{}, Complex{}, Complex{}});
  out.mag.assign(mesh.triangle_count(), 0.0);

  for (int n = 0; n < basis.size(); ++n) {
    const RwgFunction& f = basis.functions[n];
    const Complex c = coeffs[n];
    // Plus triangle: f_n = (l/2A+) (r - free); minus: (l/2A-) (free - r).
    {
      const Vec3 rho = mesh.centroid(f.tri_plus) - mesh.vertices[f.free_plus];
      const double s = f.edge_len_mm / (2.0 * f.area_plus_mm2);
      auto& v = out.vec[f.tri_plus];
      v[0] += c * (s * rho.x);
      v[1] += c * (s * rho.y);
      v[2] += c * (s * rho.z);
    }
    {
      const Vec3 rho = mesh.vertices[f.free_minus] - mesh.centroid(f.tri_minus);
      const double s = f.edge_len_mm / (2.0 * f.area_minus_mm2);
      auto& v = out.vec[f.tri_minus];
      v[0] += c * (s * rho.x);
      v[1] += c * (s * rho.y);
      v[2] += c * (s * rho.z);
    }
  }
  for (int t = 0; t < mesh.triangle_count(); ++t) {
    const auto& v = out.vec[t];
    out.mag[t] = std::sqrt(std::norm(v[0]) + std::norm(v[1]) + std::norm(v[2]));
  }
  return out;
}

SurfaceCurrent surface_current(const RwgBasisSet& basis,
                               const Eigen::VectorXd& coeffs) {
  return surface_current(basis, coeffs.cast<Complex>().eval());
}

void write_zmat(const std::string& path, const ImpedanceMatrix& zm) {
  std::ofstream f(path, std::ios::binary);
  if (!f) fail(ErrorKind::IoError, "cannot open " + path + " for writing");
  f.write("zmat v1\n", 8);
  const std::uint32_t n = static_cast<std::uint32_t>(zm.size());
  f.write(reinterpret_cast<const char*>(&n), sizeof(n));
  f.write(reinterpret_cast<const char*>(&zm.freq_GHz), sizeof(double));
  for (int i = 0; i < zm.size(); ++i)
    for (int j = 0; j < zm.size(); ++j) {
      const double re = zm.Z(i, j).real(), im = zm.Z(i, j).imag();
      f.write(reinterpret_cast<const char*>(&re), sizeof(double));
      f.write(reinterpret_cast<const char*>(&im), sizeof(double));
    }
  if (!f) fail(ErrorKind::IoError, "short write to " + path);
}

ImpedanceMatrix read_zmat(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) fail(ErrorKind::IoError, "cannot open " + path);
  char magic[8];
  f.read(magic, 8);
  if (!f || std::memcmp(magic, "zmat v1\n", 8) != 0)
    fail(ErrorKind::IoError, path + ": not a zmat v1 file");
  std::uint32_t n = 0;
  ImpedanceMatrix zm;
  f.read(reinterpret_cast<char*>(&n), sizeof(n));
  f.read(reinterpret_cast<char*>(&zm.freq_GHz), sizeof(double));
  if (!f) fail(ErrorKind::IoError, path + ": truncated header");
  zm.Z.resize(n, n);
  for (std::uint32_t i = 0; i < n; ++i)
    for (std::uint32_t j = 0; j < n; ++j) {
      double re = 0.0, im = 0.0;
      f.read(reinterpret_cast<char*>(&re), sizeof(double));
      f.read(reinterpret_cast<char*>(&im), sizeof(double));
      zm.Z(i, j) = Complex(re, im);
    }
  if (!f) fail(ErrorKind::IoError, path + ": truncated matrix data");
  return zm;
}

}  // namespace tcmom
