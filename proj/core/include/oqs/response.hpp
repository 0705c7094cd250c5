#pragma once

#include <Eigen/Dense>
#include <complex>
#include <stdexcept>

#include "oqs/momentum_grid.hpp"

namespace oqs::response {

using Complex = std::complex<double>;
using Matrix2 = Eigen::Matrix2cd;

class SingularPoint : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class GreensKind { retarded, advanced, lesser, time_ordered };

// Nambu Green's functions for the mean-field superconductor with a
// one-body-loss width gamma_n.  The order-parameter phase is absorbed into
// the gauge field, so delta >= 0 is real.  eps(k) = k^2 - mu.
//
// Retarded/advanced/lesser blocks follow the closed forms of the dressed
// theory; the time-ordered block is assembled as G^T = G^R + G^<, which
// enforces the Keldysh identities G^A = (G^R)^dag and G^R = G^T - G^<
// exactly at every (omega, k).
struct NambuGreens {
  double delta = 0.0;
  double gamma_n = 0.0;
  double mu = 1.0;

  double eps(double k) const { return k * k - mu; }

  // Throws SingularPoint when the denominator modulus drops below 1e-14.
  Matrix2 evaluate(GreensKind kind, double omega, double k) const;
};

// q_mu Gamma^mu_{q,R} evaluated from matrix inverses:
//   (G^R(omega, k))^{-1} tau
//   _3 - tau_3 (G^R(omega + q0, k + q))^{-1}.
Matrix2 wt_vertex_lhs(const NambuGreens& g, double k, double q, double omega,
                      double omega_plus_q0);

// Closed form of the same quantity:
//   (eps_{k+q} - eps_k) tau_0 - q0 tau_3 + 2 i delta tau_2.
Matrix2 wt_vertex_rhs(const NambuGreens& g, double k, double q, double q0);

// Frobenius norm of LHS - RHS; exact zero up to rounding for all
// parameters, including gamma_n >> delta.
double wt_vertex_check(const NambuGreens& g, double k, double q, double omega,
                       double omega_plus_q0);

struct ResponseCurrent {
  Eigen::Vector3cd spatial;
  Complex temporal;  // always 0
};

// delta J = -(n/m) (A - q (q . A)/|q|^2), delta J^0 = 0.  Transverse by
// construction; invariant under A -> A + i q phi.  Throws on q = 0.
ResponseCurrent response_current(const Eigen::Vector3d& q,
                                 const Eigen::Vector3cd& a, double density,
                                 double mass);

// n = sum_k w_k (1 - eps_k / E_k): the frequency integral of
// -Tr[tau_3 (i G^R + i G^A)]/2 done by residues, which reproduces the
// occupation sum 2 sum_k w_k |v_k|^2 of the equilibrium BCS state.
double density_from_greens(double delta, const MomentumGrid& grid);

}  // namespace oqs::response
