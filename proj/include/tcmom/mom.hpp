#pragma once

#include <complex>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "tcmom/rwg.hpp"

namespace tcmom {

using Complex = std::complex<double>;

// Galerkin EFIE operator at one frequency. Entries are in ohm·m^2 under the
// dimensionless-RWG convention: coefficients are surface current densities
// (A/m) and excitation entries are volts x edge length (V·m). Symmetrized
// as (Z + Z^T)/2 before return.
struct ImpedanceMatrix {
  double freq_GHz = 0.0;
  Eigen::MatrixXcd Z;
  const RwgBasisSet* basis = nullptr;  // non-owning; null after read_zmat

  int size() const { return static_cast<int>(Z.rows()); }
};

struct AssemblyOptions {
  int quad_subdiv = 1;       // 1 = 7-point rule; s applies it on s^2 subtriangles
  double near_factor = 3.0;  // centroid gap <= factor * (rho_p + rho_q) => near
};

// Mixed-potential EFIE assembly: analytic 1/R extraction plus fixed 7-point
// quadrature on near pairs, pure quadrature on far pairs. Deterministic for
// any worker count (TCM_WORKERS); each entry is reduced in a fixed order.
ImpedanceMatrix assemble_impedance(const RwgBasisSet& basis, double freq_GHz);
ImpedanceMatrix assemble_impedance(const RwgBasisSet& basis, double freq_GHz,
                                   const AssemblyOptions& options);

// R = Re(Z), X = Im(Z). `r_flagged` reports R eigenvalues below the noise
// floor -1e-8 * trace(R)/N (checked by shifted Cholesky, not a full solve).
struct ReactanceSplit {
  Eigen::MatrixXd R;
  Eigen::MatrixXd X;
  bool r_flagged = false;
};
ReactanceSplit split_reactance(const ImpedanceMatrix& zm);

// Delta-gap port bound to one basis function (one interior mesh edge).
struct PortSpec {
  int port_id = 0;
  int basis_index = -1;
  double edge_len_m = 0.0;
  double z0_ohm = 50.0;
};

// All mesh ports of the basis, in port_edges order, with default Z0.
std::vector<PortSpec> make_ports(const RwgBasisSet& basis,
                                 double z0_ohm = 50.0);

// Delta-gap excitation: volts impressed across the port edge, zero elsewhere.
// Entry value is volts * edge length (V·m); sign follows the plus-triangle
// orientation of the port's basis function.
Eigen::VectorXcd excitation_vector(const RwgBasisSet& basis,
                                   const PortSpec& port, double volts);

// Direct LU solve of Z I = V with one step of iterative refinement.
// Residual contract ||Z I - V|| / ||V|| < 1e-10; condition estimate > 1e14
// or a residual miss raises solver-failure.
Eigen::VectorXcd driven_solve(const ImpedanceMatrix& zm,
                              const Eigen::VectorXcd& v);

struct ScatteringMatrix {
  double freq_GHz = 0.0;
  Eigen::MatrixXcd S;          // P x P, power-wave normalized
  std::vector<int> port_ids;   // row/column order
  std::vector<double> z_ref_ohm;
};

// One driven solve per port reduces Z to a P x P port impedance matrix
// (port current = edge length x feed coefficient per volt), then
// S = R0^{-1/2} (Zp - R0)(Zp + R0)^{-1} R0^{1/2} with R0 = diag(Z0_i).
ScatteringMatrix scattering_matrix(const ImpedanceMatrix& zm,
                                   const std::vector<PortSpec>& ports);

// RWG expansion evaluated at triangle centroids. `vec` is the complex
// surface current density phasor (A/m), `mag` its vector magnitude.
struct SurfaceCurrent {
  std::vector<std::array<Complex, 3>> vec;
  std::vector<double> mag;
};
SurfaceCurrent surface_current(const RwgBasisSet& basis,
                               const Eigen::VectorXcd& coeffs);
SurfaceCurrent surface_current(const RwgBasisSet& basis,
                               const Eigen::VectorXd& coeffs);

// Debug dump: little-endian `zmat v1` header, uint32 N, double frequency,
// then N^2 (re, im) float64 pairs row-major.
void write_zmat(const std::string& path, const ImpedanceMatrix& zm);
ImpedanceMatrix read_zmat(const std::string& path);

}  // namespace tcmom
