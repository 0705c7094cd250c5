#pragma once

#include <optional>
#include <string>
#include <vector>

#include "oqs/fock.hpp"
#include "oqs/opspec.hpp"

namespace oqs::lindblad {

// Vectorized Lindblad generator together with the operator tables needed to
// evaluate observables along a trajectory.  The dissipator normalization is
// gamma * (L rho L^dag - {L^dag L, rho} / 2); in vectorized form
//   -i (H (x) I - I (x) H^T)
//   + sum_k gamma_k [ L (x) conj(L) - (L^dag L (x) I + I (x) (L^dag L)^T)/2 ].
struct Liouvillian {
  opspec::ModelSpec spec;
  fock::SiteOps ops;
  Eigen::Index dim;        // 4^L
  fock::SparseOp matrix;   // dim^2 x dim^2
  fock::SparseOp hamiltonian;
  std::vector<fock::SparseOp> jump_ops;
  std::vector<double> rates;
  std::vector<std::optional<int>> jump_site;  // single-site support, if any

  // observable machinery
  fock::SparseOp number_superop;      // N (x) I - I (x) N^T
  fock::SparseOp swap_nn;             // (N (x) N) S on the doubled space
  fock::SparseOp swap_n2;             // (N^2 (x) I) S
  std::vector<fock::SparseOp> site_density;     // n_r
  std::vector<fock::SparseOp> double_occupancy; // n_{r,up} n_{r,dn}
  std::vector<fock::SparseOp> bond_current;     // i J sum_s (c^dag_{r'} c_r - h.c.)
  std::vector<std::pair<int, int>> bonds;       // (from, to) per bond_current
  std::vector<fock::SparseOp> jd_divergence;    // per site, from on-site jumps
  bool all_dissipators_on_site = true;
};

fock::SparseOp build_hamiltonian(const opspec::ModelSpec& spec,
                                 const fock::SiteOps& ops);

// Throws std::invalid_argument when the superoperator dimension (4^L)^2
// would exceed 4096 or the spec fails validation.
Liouvillian build_liouvillian(const opspec::ModelSpec& spec);

struct ObservableRecord {
  double t;
  double n_total;
  double on_direct;
  double on_vectorized;
  double on_swap;
  double trace;
  std::vector<double> site_density;
  std::vector<double> double_occupancy;
  std::vector<double> bond_current;
  std::vector<double> jd_divergence;
};

struct Trajectory {
  double dt = 0.0;  // accepted step
  std::vector<ObservableRecord> records;  // one per step, including t = 0
  std::vector<double> snapshot_times;
  std::vector<fock::Matrix> snapshots;
  int halvings_used = 0;
  double observable_drift = 0.0;  // between the last two refinement levels
  double max_trace_drift_rate = 0.0;
};

struct EvolveOptions {
  double total_time = 1.0;
  double dt0 = 1e-2;
  double drift_tolerance = 1e-9;
  int max_halvings = 12;
  int max_snapshots = 256;
};

// Fixed-step RK4 on the vectorized master equation with automatic step
// halving until the coarse/fine observable drift falls below tolerance.
// Throws std::runtime_error on non-convergence.
Trajectory evolve(const Liouvillian& liou, const fock::Matrix& rho0,
                  const EvolveOptions& opts);

double observable_number(const fock::Matrix& rho, const fock::SiteOps& ops);

// O_N = Tr[N rho N rho] - Tr[N^2 rho^2], always <= 0 for valid states.
double observable_on_direct(const fock::Matrix& rho, const fock::SiteOps& ops);

// -<<rho| (N (x) I - I (x) N^T)^2 |rho>> / 2 on the vectorized state.
double observable_on_vectorized(const fock::Matrix& rho,
                                const fock::SiteOps& ops);

// Doubled-copy evaluation with the SWAP operator; requires (4^L)^2 <= 4096.
double observable_on_swap(const fock::Matrix& rho, const fock::SiteOps& ops);

struct ContinuityReport {
  std::vector<double> max_residual_per_site;
  double max_residual = 0.0;
  bool too_coarse_warning = false;
};

// residual_r(t) = d<n_r>/dt + div<j_c>_r + <div j_d>_r with centered
// differences on interior record points.  Throws std::runtime_error when a
// dissipator has multi-site support (lattice discretization of its current
// divergence is not defined here).
ContinuityReport continuity_residual(const Trajectory& traj,
                                     const Liouvillian& liou);

// Max-over-sites residual per record; NaN at the two endpoints where the
// centered difference does not exist.
std::vector<double> continuity_residual_series(const Trajectory& traj,
                                               const Liouvillian& liou);

}  // namespace oqs::lindblad
