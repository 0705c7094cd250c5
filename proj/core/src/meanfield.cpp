#include "oqs/meanfield.hpp"

#include <cmath>
#include <stdexcept>

namespace oqs::meanfield {

namespace {

double gap_residual(double delta, double attraction,
                    const MomentumGrid& grid) {
  double s = 0.0;
  for (int i = 0; i < grid.size(); ++i)
    s += grid.w[i] / (2.0 * std::hypot(grid.eps[i], delta));
  return 1.0 - attraction * s;
}

}  // namespace

double solve_gap(double attraction, const MomentumGrid& grid) {
  if (attraction <= 0.0)
    throw std::invalid_argument("solve_gap: attraction must be > 0");
  if (grid.size() == 0) throw std::invalid_argument("solve_gap: empty grid");
  double lo = 1e-12, hi = grid.cutoff;
  double flo = gap_residual(lo, attraction, grid);
  double fhi = gap_residual(hi, attraction, grid);
  if (flo > 0.0 || fhi < 0.0)
    throw NoGapSolution(
        "solve_gap: no sign change in (1e-12, cutoff]; interaction too weak "
        "for this grid");
  // residual is monotone increasing in delta
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    const double fm = gap_residual(mid, attraction, grid);
    if (std::abs(fm) < 1e-14) return mid;
    if (fm < 0.0)
      lo = mid;
    else
      hi = mid;
  }
  const double root = 0.5 * (lo + hi);
  if (std::abs(gap_residual(root, attraction, grid)) > 1e-10)
    throw NoGapSolution("solve_gap: bisection failed to converge");
  return root;
}

double attraction_for_gap(double delta0, const MomentumGrid& grid) {
  if (delta0 <= 0.0)
    throw std::invalid_argument("attraction_for_gap: delta0 must be > 0");
  double s = 0.0;
  for (int i = 0; i < grid.size(); ++i)
    s += grid.w[i] / (2.0 * std::hypot(grid.eps[i], delta0));
  return 1.0 / s;
}

BcsState init_bcs(double delta0, const MomentumGrid& grid) {
  if (delta0 <= 0.0)
    throw std::invalid_argument("init_bcs: delta0 must be > 0");
  BcsState s;
  const int n = grid.size();
  s.u.resize(n);
  s.v.resize(n);
  for (int i = 0; i < n; ++i) {
    const double e = grid.eps[i];
    const double E = std::hypot(e, delta0);
    s.u[i] = std::sqrt((E + e) / (2.0 * E));
    s.v[i] = std::sqrt((E - e) / (2.0 * E));
  }
  return s;
}

Complex order_parameter(const BcsState& s, const MomentumGrid& grid,
                        Complex u_c) {
  Complex acc(0.0, 0.0);
  for (int i = 0; i < grid.size(); ++i)
    acc += grid.w[i] * std::conj(s.u[i]) * s.v[i];
  return -u_c * acc;
}

double particle_number(const BcsState& s, const MomentumGrid& grid) {
  double n = 0.0;
  for (int i = 0; i < grid.size(); ++i)
    n += 2.0 * grid.w[i] * std::norm(s.v[i]);
  return n;
}

double mf_on(const BcsState& s, const MomentumGrid& grid) {
  double direct = 0.0, moments = 0.0;
  for (int i = 0; i < grid.size(); ++i) {
    const double u2 = std::norm(s.u[i]), v2 = std::norm(s.v[i]);
    direct += -4.0 * grid.w[i] * u2 * v2;
    const double nk = 2.0 * v2;
    moments += grid.w[i] * nk * nk;
  }
  const double alt = -2.0 * particle_number(s, grid) + moments;
  if (std::abs(direct - alt) > 1e-10)
    throw std::logic_error("mf_on: the two O_N forms disagree; "
                           "per-mode normalization broken");
  return direct;
}

double max_norm_defect(const BcsState& s) {
  double worst = 0.0;
  for (std::size_t i = 0; i < s.u.size(); ++i)
    worst = std::max(worst,
                     std::abs(std::norm(s.u[i]) + std::norm(s.v[i]) - 1.0));
  return worst;
}

namespace {

struct Workspace {
  std::vector<Complex> u, v, ku, kv, acc_u, acc_v;
};

// one RK4 step; Delta is recomputed from the stage state unless frozen
void rk4_step(BcsState& s, double dt, Complex u_c, const MomentumGrid& grid,
              const std::optional<Complex>& frozen, Workspace& w) {
  const int n = grid.size();
  auto rhs = [&](const std::vector<Complex>& u, const std::vector<Complex>& v,
                 std::vector<Complex>& du, std::vector<Complex>& dv) {
    Complex delta;
    if (frozen) {
      delta = *frozen;
    } else {
      Complex acc(0.0, 0.0);
      for (int i = 0; i < n; ++i) acc += grid.w[i] * std::conj(u[i]) * v[i];
      delta = -u_c * acc;
    }
    const Complex dconj = std::conj(delta);
    const Complex mi(0.0, -1.0);
    for (int i = 0; i < n; ++i) {
      const double e = grid.eps[i];
      du[i] = mi * (-e * u[i] + dconj * v[i]);
      dv[i] = mi * (delta * u[i] + e * v[i]);
    }
  };

  w.u = s.u;
  w.v = s.v;
  w.ku.resize(n);
  w.kv.resize(n);
  w.acc_u = s.u;
  w.acc_v = s.v;

  // k1
  rhs(s.u, s.v, w.ku, w.kv);
  for (int i = 0; i < n; ++i) {
    w.acc_u[i] += dt / 6.0 * w.ku[i];
    w.acc_v[i] += dt / 6.0 * w.kv[i];
    w.u[i] = s.u[i] + 0.5 * dt * w.ku[i];
    w.v[i] = s.v[i] + 0.5 * dt * w.kv[i];
  }
  // k2
  rhs(w.u, w.v, w.ku, w.kv);
  for (int i = 0; i < n; ++i) {
    w.acc_u[i] += dt / 3.0 * w.ku[i];
    w.acc_v[i] += dt / 3.0 * w.kv[i];
    w.u[i] = s.u[i] + 0.5 * dt * w.ku[i];
    w.v[i] = s.v[i] + 0.5 * dt * w.kv[i];
  }
  // k3
  rhs(w.u, w.v, w.ku, w.kv);
  for (int i = 0; i < n; ++i) {
    w.acc_u[i] += dt / 3.0 * w.ku[i];
    w.acc_v[i] += dt / 3.0 * w.kv[i];
    w.u[i] = s.u[i] + dt * w.ku[i];
    w.v[i] = s.v[i] + dt * w.kv[i];
  }
  // k4
  rhs(w.u, w.v, w.ku, w.kv);
  for (int i = 0; i < n; ++i) {
    s.u[i] = w.acc_u[i] + dt / 6.0 * w.ku[i];
    s.v[i] = w.acc_v[i] + dt / 6.0 * w.kv[i];
  }
}

std::vector<BcsRunRow> run_bcs(const BcsState& initial, double attraction,
                               double gamma, const MomentumGrid& grid,
                               const BcsRunOptions& opts, long steps,
                               double* norm_defect_out, BcsState* final_out) {
  const Complex u_c(attraction, 0.5 * gamma);
  const double dt = opts.total_time / static_cast<double>(steps);
  BcsState s = initial;
  Workspace w;
  std::vector<BcsRunRow> rows;
  rows.reserve(steps + 1);
  double defect = 0.0;
  auto push = [&](double t) {
    rows.push_back({t,
                    opts.frozen_delta ? *opts.frozen_delta
                                      : order_parameter(s, grid, u_c),
                    particle_number(s, grid), mf_on(s, grid)});
  };
  push(0.0);
  for (long i = 1; i <= steps; ++i) {
    rk4_step(s, dt, u_c, grid, opts.frozen_delta, w);
    s.time = initial.time + static_cast<double>(i) * dt;
    defect = std::max(defect, max_norm_defect(s));
    push(s.time);
  }
  *norm_defect_out = defect;
  *final_out = std::move(s);
  return rows;
}

}  // namespace

std::vector<BcsRunRow> evolve_bcs(BcsState& state, double attraction,
                                  double gamma, const MomentumGrid& grid,
                                  const BcsRunOptions& opts) {
  if (opts.dt0 <= 0.0 || opts.total_time < 0.0)
    throw std::invalid_argument("evolve_bcs: bad time parameters");
  if (static_cast<int>(state.u.size()) != grid.size())
    throw std::invalid_argument("evolve_bcs: state/grid size mismatch");
  long steps = std::max<long>(1, std::lround(opts.total_time / opts.dt0));
  for (int halving = 0; halving <= opts.max_halvings; ++halving) {
    double defect = 0.0;
    BcsState final_state;
    auto rows = run_bcs(state, attraction, gamma, grid, opts, steps, &defect,
                        &final_state);
    if (defect < opts.norm_tolerance) {
      state = std::move(final_state);
      return rows;
    }
    steps *= 2;
  }
  throw std::runtime_error(
      "evolve_bcs: per-mode norm drift exceeded tolerance after maximum "
      "step halvings");
}

}  // namespace oqs::meanfield
