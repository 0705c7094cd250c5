#pragma once

#include <span>
#include <stdexcept>
#include <vector>

#include "oqs/momentum_grid.hpp"

namespace oqs::collective {

class ContinuumCollision : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class NoRootInBracket : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Gauss-Legendre nodes/weights on [-1, 1].
struct GaussLegendre {
  std::vector<double> x, w;
  explicit GaussLegendre(int order);
};

// Pair-breaking continuum edge min_{k, angle} (E_k + E_{k+q}).
double continuum_edge(double q, double delta, const MomentumGrid& grid,
                      int gl_order = 64);

// Angular average of the tau_2 vertex condition at zeroth order in the
// dissipation (gap equation already substituted):
//   sum_k w_k < (E+E')/(E E') * (q0^2 - (k q x / m)^2) / (q0^2 - (E+E')^2) >_x
// Throws ContinuumCollision when q0 lies at or above the continuum edge.
double zeroth_order_residual(double q0, double q, double delta,
                             const MomentumGrid& grid, int gl_order = 64);

struct RootPoint {
  double q;
  double q0;
};

struct SoundVelocityFit {
  double v_s;           // least-squares slope through the origin
  double v_s_analytic;  // v_F / sqrt(3)
  std::vector<RootPoint> roots;
};

// Brackets and bisects the zeroth-order residual in q0 for each q, then
// fits q0 = v_s q through the origin.
SoundVelocityFit solve_sound_velocity(std::span<const double> qs, double delta,
                                      const MomentumGrid& grid,
                                      int gl_order = 64);

// D = 3 sqrt(3) gamma n v_F^2 / (8 delta^2); throws on delta = 0.
double diffusion_analytic(double gamma, double density, double fermi_velocity,
                          double delta);

struct DiffusionPoint {
  double q;
  double q0_root;
  double s1;         // regularized first-order integral
  double f;          // extracted dispersion correction factor
  double f_over_q2;
};

struct DiffusionFit {
  double d_estimate;
  double d_analytic;
  std::vector<DiffusionPoint> points;
  bool regime_warning = false;      // gamma*n > 0.1*delta
  double eta_ladder_defect = 0.0;   // convergence proxy of the regularization
};

// First-order dissipative correction to the mode frequency, evaluated from
// the 2D quadrature (radial grid x Gauss-Legendre angle) of the combined
// first-order integrand at the zeroth-order root.  The on-shell double
// poles (q0 + E - E' = 0) make the raw integrand non-integrable, so the
// frequency is shifted by +i eta and the real part is Richardson-
// extrapolated over an eta ladder (eta = {0.04, 0.02, 0.01} delta): the
// limit is the Hadamard finite part.  f(q) is normalized against
// K v_F q / (4 sqrt(3) delta^3) with K = sum_k w_k, the fit of f against
// q^2 gives D = gamma n * fit.  negative_branch runs the mirrored root.
DiffusionFit diffusion_numeric(std::span<const double> qs, double gamma,
                               double density, double delta,
                               const MomentumGrid& grid, int gl_order = 64,
                               bool negative_branch = false);

}  // namespace oqs::collective
