#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "tcmom/cma.hpp"
#include "tcmom/constants.hpp"
#include "tcmom/errors.hpp"

namespace tcmom {
namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

void require_symmetric(const Eigen::MatrixXd& m, const char* name) {
  const double scale = std::max(1.0, m.cwiseAbs().maxCoeff());
  if ((m - m.transpose()).cwiseAbs().maxCoeff() > 1e-10 * scale)
    fail(ErrorKind::InvalidInput, std::string(name) + " is not symmetric");
}

// Hungarian algorithm (potentials + shortest augmenting paths) minimizing
// total cost on a square matrix; standard O(K^3) formulation.
std::vector<int> hungarian_min(const Eigen::MatrixXd& a) {
  const int n = static_cast<int>(a.rows());
  const double inf = std::numeric_limits<double>::infinity();
  std::vector<double> u(n + 1, 0.0), v(n + 1, 0.0);
  std::vector<int> p(n + 1, 0), way(n + 1, 0);
  for (int i = 1; i <= n; ++i) {
    p[0] = i;
    int j0 = 0;
    std::vector<double> minv(n + 1, inf);
    std::vector<char> used(n + 1, 0);
    do {
      used[j0] = 1;
      const int i0 = p[j0];
      int j1 = -1;
      double delta = inf;
      for (int j = 1; j <= n; ++j) {
        if (used[j]) continue;
        const double cur = a(i0 - 1, j - 1) - u[i0] - v[j];
        if (cur < minv[j]) {
          minv[j] = cur;
          way[j] = j0;
        }
        if (minv[j] < delta) {
          delta = minv[j];
          j1 = j;
        }
      }
      for (int j = 0; j <= n; ++j) {
        if (used[j]) {
          u[p[j]] += delta;
          v[j] -= delta;
        } else {
          minv[j] -= delta;
        }
      }
      j0 = j1;
    } while (p[j0] != 0);
    do {
      const int j1 = way[j0];
      p[j0] = p[j1];
      j0 = j1;
    } while (j0 != 0);
  }
  std::vector<int> row_to_col(n, -1);
  for (int j = 1; j <= n; ++j)
    if (p[j] >= 1) row_to_col[p[j] - 1] = j - 1;
  return row_to_col;
}

}  // namespace

double modal_significance(double lambda) {
  return 1.0 / std::sqrt(1.0 + lambda * lambda);
}

double characteristic_angle(double lambda) {
  return 180.0 - std::atan(lambda) * 180.0 / kPi;
}

ModeSet solve_modes(const Eigen::MatrixXd& r, const Eigen::MatrixXd& x,
                    int n_modes, double freq_GHz) {
  const int n = static_cast<int>(r.rows());
  if (r.cols() != n || x.rows() != n || x.cols() != n)
    fail(ErrorKind::InvalidInput, "R and X must be square with equal size");
  if (n_modes < 1 || n_modes > n)
    fail(ErrorKind::InvalidInput,
         "n_modes must be in [1, N], got " + std::to_string(n_modes));
  require_symmetric(r, "R");
  require_symmetric(x, "X");

  // Regularize R just enough for a Cholesky factorization. Discretization
  // noise can push R's null-space eigenvalues slightly negative (more so for
  // electrically large cells), so the shift escalates geometrically from a
  // baseline that is invisible at well-conditioned samples.
  double eps = 0.0;
  Eigen::MatrixXd r_reg;
  Eigen::LLT<Eigen::MatrixXd> llt;
  for (double mult = 1e-10; mult < 1e-3; mult *= 100.0) {
    eps = mult * r.trace() / n;
    r_reg = r;
    if (eps > 0.0) r_reg.diagonal().array() += eps;
    llt.compute(r_reg);
    if (llt.info() == Eigen::Success) break;
    if (!(eps > 0.0)) break;  // nonpositive trace: escalation cannot help
  }
  if (llt.info() != Eigen::Success)
    fail(ErrorKind::IndefiniteR,
         "R is not positive definite after regularization (eps=" +
             std::to_string(eps) + ")");
  const Eigen::MatrixXd l = llt.matrixL();

  Eigen::MatrixXd b = l.triangularView<Eigen::Lower>().solve(x);
  b = l.triangularView<Eigen::Lower>().solve(b.transpose().eval()).transpose();
  const Eigen::MatrixXd b_sym = 0.5 * (b + b.transpose());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(b_sym);
  if (es.info() != Eigen::Success)
    fail(ErrorKind::SolverFailure, "symmetric eigensolver did not converge");

  // Modes with smallest |lambda| first; ties broken by signed value so the
  // ordering is deterministic.
  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);
  const Eigen::VectorXd& ev = es.eigenvalues();
  std::sort(order.begin(), order.end(), [&](int a1, int a2) {
    const double m1 = std::abs(ev[a1]), m2 = std::abs(ev[a2]);
    if (m1 != m2) return m1 < m2;
    return ev[a1] < ev[a2];
  });

  ModeSet out;
  out.freq_GHz = freq_GHz;
  out.lambda.resize(n_modes);
  out.ms.resize(n_modes);
  out.J.resize(n, n_modes);
  out.diag.epsilon = eps;

  std::vector<char> well_normed(static_cast<std::size_t>(n_modes), 0);
  for (int m = 0; m < n_modes; ++m) {
    const int src = order[m];
    Eigen::VectorXd j = l.transpose().triangularView<Eigen::Upper>().solve(
        es.eigenvectors().col(src));
    // Normalize against the unregularized R so J^T R J = I holds exactly on
    // the diagonal. Deep in the reactive tail (reachable only when n_modes
    // approaches N) R is numerically singular and j^T R j falls to zero or
    // below; dividing by that vanishing norm would blow the column up, so
    // those modes keep the regularized normalization j^T (R + eps I) j = 1,
    // which holds exactly by construction.
    const double d = j.dot(r * j);
    if (d >= 0.5) {
      j /= std::sqrt(d);
      well_normed[static_cast<std::size_t>(m)] = 1;
    }
    out.J.col(m) = j;
    out.lambda[m] = ev[src];
  }

  // The eps shift perturbs each eigenpair by roughly eps * ||J||^2, which can
  // exhaust the 1e-8 residual budget when R is nearly singular (EFIE R always
  // is away from resonance). A Rayleigh-quotient iteration against the
  // unregularized pencil restores machine-precision residuals; deflation in
  // the R inner product keeps clustered modes from collapsing onto each other.
  // Near-null-space modes stay on their reduced-problem eigenpair: the true R
  // cannot normalize them and the shifted solves below are meaningless there.
  Eigen::MatrixXd rj_done(n, n_modes);
  for (int m = 0; m < n_modes; ++m) {
    Eigen::VectorXd j = out.J.col(m);
    double lam = out.lambda[m];
    if (well_normed[static_cast<std::size_t>(m)]) {
      for (int it = 0; it < 3; ++it) {
        const Eigen::VectorXd rj = r * j;
        const Eigen::VectorXd xj = x * j;
        const double num = (xj - lam * rj).norm();
        const double den = xj.norm() + std::abs(lam) * rj.norm();
        if (!(den > 0.0)) break;
        const double res = num / den;
        if (res < 1e-10) break;
        Eigen::PartialPivLU<Eigen::MatrixXd> lu(x - lam * r);
        Eigen::VectorXd w = lu.solve(rj);
        if (!w.allFinite()) break;
        for (int i = 0; i < m; ++i)
          w -= out.J.col(i) * rj_done.col(i).dot(w);
        const double d = w.dot(r * w);
        if (!(d > 0.0)) break;
        w /= std::sqrt(d);
        // The shifted solve can drift onto a neighboring eigenvector when the
        // seed is poor. Accept the step only if it keeps the seed's direction
        // and actually lowers the residual; otherwise the seed stands.
        const double align = std::abs(w.dot(j)) / (w.norm() * j.norm());
        if (align < 0.9) break;
        const double lam_new = w.dot(x * w);
        const Eigen::VectorXd rw = r * w;
        const Eigen::VectorXd xw = x * w;
        const double num_new = (xw - lam_new * rw).norm();
        const double den_new = xw.norm() + std::abs(lam_new) * rw.norm();
        if (!(den_new > 0.0) || num_new / den_new >= res) break;
        j = w;
        lam = lam_new;
      }
      for (int i = 0; i < m; ++i) j -= out.J.col(i) * rj_done.col(i).dot(j);
      const double d = j.dot(r * j);
      if (d > 0.0) j /= std::sqrt(d);
      out.J.col(m) = j;
      out.lambda[m] = lam;
    }
    rj_done.col(m) = r * out.J.col(m);
  }

  // Refinement can nudge near-tied eigenvalues across each other; restore
  // the |lambda| ordering, then fix signs for determinism.
  std::vector<int> fin(n_modes);
  std::iota(fin.begin(), fin.end(), 0);
  std::sort(fin.begin(), fin.end(), [&](int a1, int a2) {
    const double m1 = std::abs(out.lambda[a1]), m2 = std::abs(out.lambda[a2]);
    if (m1 != m2) return m1 < m2;
    return out.lambda[a1] < out.lambda[a2];
  });
  const Eigen::MatrixXd j_tmp = out.J;
  const Eigen::VectorXd lam_tmp = out.lambda;
  for (int m = 0; m < n_modes; ++m) {
    Eigen::VectorXd j = j_tmp.col(fin[m]);
    int arg = 0;
    for (int i = 1; i < n; ++i)
      if (std::abs(j[i]) > std::abs(j[arg])) arg = i;
    if (j[arg] < 0.0) j = -j;
    out.J.col(m) = j;
    out.lambda[m] = lam_tmp[fin[m]];
    out.ms[m] = modal_significance(out.lambda[m]);
  }

  out.RJ = r * out.J;
  const Eigen::MatrixXd gram = out.J.transpose() * out.RJ;
  out.diag.max_ortho_err =
      (gram - Eigen::MatrixXd::Identity(n_modes, n_modes)).cwiseAbs().maxCoeff();
  const Eigen::MatrixXd xj = x * out.J;
  for (int m = 0; m < n_modes; ++m) {
    const double num = (xj.col(m) - out.lambda[m] * out.RJ.col(m)).norm();
    const double den =
        xj.col(m).norm() + std::abs(out.lambda[m]) * out.RJ.col(m).norm();
    if (den > 0.0)
      out.diag.max_eig_residual =
          std::max(out.diag.max_eig_residual, num / den);
  }
  return out;
}

std::vector<ModeSet> sweep_modes(const RwgBasisSet& basis,
                                 const std::vector<double>& freq_GHz,
                                 int n_modes) {
  if (freq_GHz.empty())
    fail(ErrorKind::InvalidInput, "empty frequency grid");
  for (size_t i = 0; i < freq_GHz.size(); ++i) {
    if (!(freq_GHz[i] > 0.0))
      fail(ErrorKind::InvalidInput, "frequencies must be > 0 GHz");
    if (i > 0 && !(freq_GHz[i] > freq_GHz[i - 1]))
      fail(ErrorKind::InvalidInput, "frequency grid must be ascending");
  }
  std::vector<ModeSet> sweep;
  sweep.reserve(freq_GHz.size());
  for (const double f : freq_GHz) {
    try {
      const ImpedanceMatrix zm = assemble_impedance(basis, f);
      const ReactanceSplit rx = split_reactance(zm);
      ModeSet ms = solve_modes(rx.R, rx.X, n_modes, f);
      ms.diag.r_flagged = rx.r_flagged;
      sweep.push_back(std::move(ms));
    } catch (const Error& e) {
      throw Error(e.kind(), std::string(e.what()) + " [sweep sample f=" +
                                std::to_string(f) + " GHz]");
    }
  }
  return sweep;
}

std::vector<int> max_assignment(const Eigen::MatrixXd& score) {
  const int rows = static_cast<int>(score.rows());
  const int cols = static_cast<int>(score.cols());
  if (rows == 0 || cols == 0) return std::vector<int>(rows, -1);
  const int k = std::max(rows, cols);
  const double top = std::max(0.0, score.maxCoeff());
  // Pad to square; dummy cells behave like score 0, so minimizing
  // (top - score) maximizes the total matched score.
  Eigen::MatrixXd cost = Eigen::MatrixXd::Constant(k, k, top);
  for (int i = 0; i < rows; ++i)
    for (int j = 0; j < cols; ++j) cost(i, j) = top - score(i, j);
  std::vector<int> match = hungarian_min(cost);
  match.resize(rows);
  for (int i = 0; i < rows; ++i)
    if (match[i] >= cols) match[i] = -1;
  return match;
}

TrackedModes track_modes(const std::vector<ModeSet>& sweep,
                         double min_correlation) {
  if (sweep.empty()) fail(ErrorKind::InvalidInput, "empty sweep");
  const int n = sweep.front().basis_size();
  for (const ModeSet& ms : sweep)
    if (ms.basis_size() != n)
      fail(ErrorKind::InvalidInput, "sweep samples use different bases");

  const int samples = static_cast<int>(sweep.size());
  struct Build {
    std::vector<int> raw;
    std::vector<double> corr;
    int created = 0;
  };
  std::vector<Build> tracks;
  auto new_track = [&](int sample, int raw_mode) {
    Build b;
    b.raw.assign(samples, -1);
    b.corr.assign(samples, kNaN);
    b.raw[sample] = raw_mode;
    b.created = static_cast<int>(tracks.size());
    tracks.push_back(std::move(b));
    return static_cast<int>(tracks.size()) - 1;
  };

  std::vector<int> track_of(sweep[0].n_modes());
  for (int m = 0; m < sweep[0].n_modes(); ++m) track_of[m] = new_track(0, m);

  for (int s = 1; s < samples; ++s) {
    const ModeSet& prev = sweep[s - 1];
    const ModeSet& cur = sweep[s];
    Eigen::MatrixXd c(prev.n_modes(), cur.n_modes());
    for (int m = 0; m < prev.n_modes(); ++m)
      for (int q = 0; q < cur.n_modes(); ++q)
        c(m, q) = std::abs(prev.RJ.col(m).dot(cur.J.col(q)));

    const std::vector<int> match = max_assignment(c);
    std::vector<int> next_track(cur.n_modes(), -1);
    for (int m = 0; m < prev.n_modes(); ++m) {
      const int q = match[m];
      if (q < 0 || c(m, q) < min_correlation) continue;
      const int t = track_of[m];
      tracks[t].raw[s] = q;
      tracks[t].corr[s] = c(m, q);
      next_track[q] = t;
    }
    for (int q = 0; q < cur.n_modes(); ++q)
      if (next_track[q] < 0) next_track[q] = new_track(s, q);
    track_of = std::move(next_track);
  }

  // Order tracks by the frequency at which their MS first peaks.
  struct Key {
    int peak_sample, start_sample, created, index;
  };
  std::vector<Key> keys;
  for (size_t t = 0; t < tracks.size(); ++t) {
    int peak = -1, start = -1;
    double best = -1.0;
    for (int s = 0; s < samples; ++s) {
      const int rawm = tracks[t].raw[s];
      if (rawm < 0) continue;
      if (start < 0) start = s;
      const double ms = sweep[s].ms[rawm];
      if (ms > best) {
        best = ms;
        peak = s;
      }
    }
    keys.push_back({peak, start, tracks[t].created, static_cast<int>(t)});
  }
  std::sort(keys.begin(), keys.end(), [](const Key& a, const Key& b) {
    if (a.peak_sample != b.peak_sample) return a.peak_sample < b.peak_sample;
    if (a.start_sample != b.start_sample) return a.start_sample < b.start_sample;
    return a.created < b.created;
  });

  TrackedModes out;
  for (const ModeSet& ms : sweep) out.freq_GHz.push_back(ms.freq_GHz);
  for (size_t rank = 0; rank < keys.size(); ++rank) {
    const Build& b = tracks[keys[rank].index];
    TrackedMode tm;
    tm.id = static_cast<int>(rank) + 1;
    tm.raw_index = b.raw;
    tm.link_corr = b.corr;
    tm.lambda.assign(samples, kNaN);
    tm.ms.assign(samples, kNaN);
    for (int s = 0; s < samples; ++s) {
      if (b.raw[s] < 0) continue;
      tm.lambda[s] = sweep[s].lambda[b.raw[s]];
      tm.ms[s] = sweep[s].ms[b.raw[s]];
    }
    out.modes.push_back(std::move(tm));
  }
  return out;
}

ModalExpansion modal_expand(const ModeSet& modes, const Eigen::VectorXcd& v,
                            const Eigen::VectorXcd* reference) {
  if (v.size() != modes.basis_size())
    fail(ErrorKind::InvalidInput, "excitation length does not match basis");
  ModalExpansion out;
  out.v_coeff = modes.J.transpose().cast<Complex>() * v;
  out.alpha.resize(modes.n_modes());
  for (int m = 0; m < modes.n_modes(); ++m)
    out.alpha[m] = out.v_coeff[m] / Complex(1.0, modes.lambda[m]);
  out.j_hat = modes.J.cast<Complex>() * out.alpha;
  if (reference != nullptr && reference->norm() > 0.0)
    out.residual = (out.j_hat - *reference).norm() / reference->norm();
  else
    out.residual = kNaN;
  return out;
}

std::vector<FreqBand> radiating_band(const std::vector<double>& freq_GHz,
                                     const std::vector<double>& ms,
                                     double threshold) {
  if (freq_GHz.size() != ms.size())
    fail(ErrorKind::InvalidInput, "frequency and MS sample counts differ");
  if (freq_GHz.size() < 2)
    fail(ErrorKind::InvalidInput, "radiating band needs >= 2 samples");

  const int s_count = static_cast<int>(ms.size());
  auto above = [&](int s) {
    return !std::isnan(ms[s]) && ms[s] >= threshold;
  };
  std::vector<FreqBand> bands;
  int s = 0;
  while (s < s_count) {
    if (!above(s)) {
      ++s;
      continue;
    }
    // Left endpoint: interpolate from the previous sample when it is below
    // threshold (and not a gap).
    double left = freq_GHz[s];
    if (s > 0 && !std::isnan(ms[s - 1]) && ms[s - 1] < threshold)
      left = freq_GHz[s - 1] + (threshold - ms[s - 1]) / (ms[s] - ms[s - 1]) *
                                   (freq_GHz[s] - freq_GHz[s - 1]);
    int e = s;
    while (e + 1 < s_count && above(e + 1)) ++e;
    double right = freq_GHz[e];
    if (e + 1 < s_count && !std::isnan(ms[e + 1]) && ms[e + 1] < threshold)
      right = freq_GHz[e] + (ms[e] - threshold) / (ms[e] - ms[e + 1]) *
                                (freq_GHz[e + 1] - freq_GHz[e]);
    bands.emplace_back(left, right);
    s = e + 1;
  }
  return bands;
}

std::vector<FreqBand> radiating_band(const TrackedModes& tracked,
                                     int track_index, double threshold) {
  if (track_index < 0 || track_index >= static_cast<int>(tracked.modes.size()))
    fail(ErrorKind::InvalidInput, "track index out of range");
  return radiating_band(tracked.freq_GHz, tracked.modes[track_index].ms,
                        threshold);
}

}  // namespace tcmom
