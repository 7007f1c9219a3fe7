#pragma once

#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "tcmom/mom.hpp"

namespace tcmom {

struct ModeDiagnostics {
  double epsilon = 0.0;          // regularization added to R before Cholesky
  double max_ortho_err = 0.0;    // max |J^T R J - I| entry (unregularized R)
  double max_eig_residual = 0.0; // max_n ||XJ_n - l_n RJ_n||/(||XJ_n||+|l_n|||RJ_n||)
  double max_imag_residue = 0.0; // 0 by construction (symmetric reduction)
  bool r_flagged = false;        // split_reactance definiteness flag
};

// Characteristic modes at one frequency: X J_n = lambda_n R J_n, the n_modes
// of smallest |lambda| (most significant first). Columns are R-orthonormal
// with the largest-magnitude entry positive. RJ = R * J is kept so sweep
// tracking can correlate against the next sample without retaining R.
struct ModeSet {
  double freq_GHz = 0.0;
  Eigen::VectorXd lambda;
  Eigen::MatrixXd J;
  Eigen::MatrixXd RJ;
  Eigen::VectorXd ms;
  ModeDiagnostics diag;

  int n_modes() const { return static_cast<int>(lambda.size()); }
  int basis_size() const { return static_cast<int>(J.rows()); }
};

// Regularized reduction: R~ = R + eps I (eps = 1e-10 trace/N), Cholesky
// R~ = L L^T, symmetric solve of L^{-1} X L^{-T}, map back J = L^{-T} y.
ModeSet solve_modes(const Eigen::MatrixXd& r, const Eigen::MatrixXd& x,
                    int n_modes, double freq_GHz = 0.0);

double modal_significance(double lambda);   // 1/sqrt(1+lambda^2)
double characteristic_angle(double lambda); // 180 - atan(lambda)*180/pi

// Assemble -> split -> solve at each grid point (ascending positive grid).
std::vector<ModeSet> sweep_modes(const RwgBasisSet& basis,
                                 const std::vector<double>& freq_GHz,
                                 int n_modes);

// One tracked mode across the sweep grid. Samples where the mode is absent
// hold raw_index -1 and NaN lambda/ms. link_corr[s] is the correlation of
// the link from sample s-1 into sample s (NaN for track starts and gaps).
struct TrackedMode {
  int id = 0;
  std::vector<int> raw_index;
  std::vector<double> lambda;
  std::vector<double> ms;
  std::vector<double> link_corr;
};

struct TrackedModes {
  std::vector<double> freq_GHz;
  std::vector<TrackedMode> modes;  // ordered by frequency of first MS peak
};

// Optimal bipartite assignment (Hungarian, O(K^3)) maximizing total score.
// Returns the matched column per row, -1 where unmatched (cols < rows).
std::vector<int> max_assignment(const Eigen::MatrixXd& score);

// Adjacent-sample assignment maximizing total correlation
// C(m,n) = |J_m(f_i)^T R(f_i) J_n(f_{i+1})|; links below min_correlation
// start new tracked ids.
TrackedModes track_modes(const std::vector<ModeSet>& sweep,
                         double min_correlation = 0.7);

struct ModalExpansion {
  Eigen::VectorXcd v_coeff;  // J_n^T V per mode
  Eigen::VectorXcd alpha;    // v_coeff_n / (1 + j lambda_n)
  Eigen::VectorXcd j_hat;    // sum alpha_n J_n
  double residual = 0.0;     // ||j_hat - reference|| / ||reference||; NaN if no reference
};

ModalExpansion modal_expand(const ModeSet& modes, const Eigen::VectorXcd& v,
                            const Eigen::VectorXcd* reference = nullptr);

constexpr double kMsBandThreshold = 0.70710678;  // 1/sqrt(2), half-power edge

using FreqBand = std::pair<double, double>;

// Maximal sub-intervals where ms >= threshold, endpoints linearly
// interpolated between samples; absent samples (NaN) break bands.
std::vector<FreqBand> radiating_band(const std::vector<double>& freq_GHz,
                                     const std::vector<double>& ms,
                                     double threshold = kMsBandThreshold);
std::vector<FreqBand> radiating_band(const TrackedModes& tracked,
                                     int track_index,
                                     double threshold = kMsBandThreshold);

}  // namespace tcmom
