#pragma once

#include <complex>
#include <optional>
#include <vector>

#include "oqs/momentum_grid.hpp"

namespace oqs::meanfield {

using Complex = std::complex<double>;

// Thrown when the gap equation has no positive root on the grid.
class NoGapSolution : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Solves 1 = U sum_k w_k / (2 sqrt(eps_k^2 + Delta^2)) for Delta > 0 by
// bracketing and bisection; residual below 1e-10 at the returned root.
double solve_gap(double attraction, const MomentumGrid& grid);

// Interaction strength whose gap-equation root is exactly delta0 on the
// given grid (the inverse of solve_gap).
double attraction_for_gap(double delta0, const MomentumGrid& grid);

struct BcsState {
  std::vector<Complex> u, v;
  double time = 0.0;
};

// Equilibrium Bogoliubov amplitudes u_k = sqrt((E+eps)/2E),
// v_k = sqrt((E-eps)/2E) for gap delta0.
BcsState init_bcs(double delta0, const MomentumGrid& grid);

// Delta = -U_c sum_k w_k u_k^* v_k (grid-measure normalization).  For the
// equilibrium state this returns -delta0 * U_c / U, so |Delta| = delta0 at
// gamma = 0.
Complex order_parameter(const BcsState& s, const MomentumGrid& grid,
                        Complex u_c);

double particle_number(const BcsState& s, const MomentumGrid& grid);

// O_N = -4 sum_k w_k |u_k|^2 |v_k|^2; cross-checked internally against the
// equivalent form -2N + sum_k w_k n_k^2 to 1e-10.
double mf_on(const BcsState& s, const MomentumGrid& grid);

double max_norm_defect(const BcsState& s);  // max | |u|^2+|v|^2 - 1 |

struct BcsRunRow {
  double t;
  Complex delta;
  double n;
  double on;
};

struct BcsRunOptions {
  double total_time = 10.0;
  double dt0 = 5e-3;
  double norm_tolerance = 1e-8;
  int max_halvings = 10;
  // When set, the pair field is held at this value instead of being
  // recomputed self-consistently (single-mode test drives).
  std::optional<Complex> frozen_delta;
};

// RK4 on the (u_k, v_k) system i d/dt (u,v) = [[-eps, Delta*],[Delta, eps]]
// with Delta recomputed from the stage state at every RK4 stage,
// U_c = U + i gamma / 2.  Halves the step until the per-mode norm defect
// stays below norm_tolerance; throws std::runtime_error on failure.
std::vector<BcsRunRow> evolve_bcs(BcsState& state, double attraction,
                                  double gamma, const MomentumGrid& grid,
                                  const BcsRunOptions& opts);

}  // namespace oqs::meanfield
