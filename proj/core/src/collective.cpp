#include "oqs/collective.hpp"

#include <cmath>
#include <complex>

namespace oqs::collective {

GaussLegendre::GaussLegendre(int order) {
  if (order < 2) throw std::invalid_argument("GaussLegendre: order >= 2");
  x.resize(order);
  w.resize(order);
  const int m = (order + 1) / 2;
  for (int i = 0; i < m; ++i) {
    // Newton iteration from the Chebyshev estimate
    double z = std::cos(M_PI * (i + 0.75) / (order + 0.5));
    double pp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p1 = 1.0, p2 = 0.0;
      for (int j = 0; j < order; ++j) {
        const double p3 = p2;
        p2 = p1;
        p1 = ((2.0 * j + 1.0) * z * p2 - j * p3) / (j + 1);
      }
      pp = order * (z * p1 - p2) / (z * z - 1.0);
      const double z1 = z;
      z = z1 - p1 / pp;
      if (std::abs(z - z1) < 1e-15) break;
    }
    x[i] = -z;
    x[order - 1 - i] = z;
    w[i] = 2.0 / ((1.0 - z * z) * pp * pp);
    w[order - 1 - i] = w[i];
  }
}

namespace {

double e_quasi(double eps, double delta) { return std::hypot(eps, delta); }

}  // namespace

double continuum_edge(double q, double delta, const MomentumGrid& grid,
                      int gl_order) {
  GaussLegendre gl(gl_order);
  double edge = std::numeric_limits<double>::max();
  for (int i = 0; i < grid.size(); ++i) {
    const double k = grid.k[i];
    const double ek = e_quasi(grid.eps[i], delta);
    for (int a = 0; a < gl_order; ++a) {
      const double kpq2 = k * k + q * q + 2.0 * k * q * gl.x[a];
      const double ep = kpq2 - grid.mu;
      edge = std::min(edge, ek + e_quasi(ep, delta));
    }
  }
  return edge;
}

double zeroth_order_residual(double q0, double q, double delta,
                             const MomentumGrid& grid, int gl_order) {
  if (q <= 0.0)
    throw std::invalid_argument("zeroth_order_residual: q must be > 0");
  GaussLegendre gl(gl_order);
  const double m = grid.mass();
  double out = 0.0;
  double edge = std::numeric_limits<double>::max();
  for (int i = 0; i < grid.size(); ++i) {
    const double k = grid.k[i];
    const double ek = e_quasi(grid.eps[i], delta);
    double acc = 0.0;
    for (int a = 0; a < gl_order; ++a) {
      const double x = gl.x[a];
      const double kpq2 = k * k + q * q + 2.0 * k * q * x;
      const double ep = e_quasi(kpq2 - grid.mu, delta);
      edge = std::min(edge, ek + ep);
      const double vel = k * q * x / m;
      acc += 0.5 * gl.w[a] * (ek + ep) / (ek * ep) * (q0 * q0 - vel * vel) /
             (q0 * q0 - (ek + ep) * (ek + ep));
    }
    out += grid.w[i] * acc;
  }
  if (std::abs(q0) >= edge)
    throw ContinuumCollision(
        "zeroth_order_residual: q0 inside the pair-breaking continuum");
  return out;
}

namespace {

double bisect_root(double q, double delta, const MomentumGrid& grid,
                   int gl_order) {
  const double edge = continuum_edge(q, delta, grid, gl_order);
  const double hi = 0.95 * edge;
  const double lo = 1e-6 * hi;
  // geometric scan for the first sign change, then bisection
  const int n_scan = 32;
  double prev = lo;
  double fprev = zeroth_order_residual(prev, q, delta, grid, gl_order);
  for (int s = 1; s <= n_scan; ++s) {
    const double t =
        lo * std::pow(hi / lo, static_cast<double>(s) / n_scan);
    const double ft = zeroth_order_residual(t, q, delta, grid, gl_order);
    if (fprev * ft <= 0.0) {
      double a = prev, b = t, fa = fprev;
      for (int it = 0; it < 90; ++it) {
        const double c = 0.5 * (a + b);
        const double fc = zeroth_order_residual(c, q, delta, grid, gl_order);
        if (fa * fc <= 0.0) {
          b = c;
        } else {
          a = c;
          fa = fc;
        }
      }
      return 0.5 * (a + b);
    }
    prev = t;
    fprev = ft;
  }
  throw NoRootInBracket(
      "solve_sound_velocity: no sign change below the continuum edge");
}

}  // namespace

SoundVelocityFit solve_sound_velocity(std::span<const double> qs, double delta,
                                      const MomentumGrid& grid, int gl_order) {
  if (qs.empty())
    throw std::invalid_argument("solve_sound_velocity: empty q list");
  SoundVelocityFit fit;
  fit.v_s_analytic = grid.fermi_velocity() / std::sqrt(3.0);
  double num = 0.0, den = 0.0;
  for (double q : qs) {
    const double root = bisect_root(q, delta, grid, gl_order);
    fit.roots.push_back({q, root});
    num += q * root;
    den += q * q;
  }
  fit.v_s = num / den;
  return fit;
}

double diffusion_analytic(double gamma, double density, double fermi_velocity,
                          double delta) {
  if (delta == 0.0)
    throw std::invalid_argument("diffusion_analytic: delta must be nonzero");
  return 3.0 * std::sqrt(3.0) * gamma * density * fermi_velocity *
         fermi_velocity / (8.0 * delta * delta);
}

namespace {

// Combined first-order integrand, frequency shifted into the upper half
// plane; the eta -> 0+ limit of the real part is the finite-part integral.
std::complex<double> first_order_integral(double q, double q0, double eta,
                                          double delta,
                                          const MomentumGrid& grid,
                                          const GaussLegendre& gl) {
  const std::complex<double> q0c(q0, eta);
  std::complex<double> out(0.0, 0.0);
  const double d2 = delta * delta;
  for (int i = 0; i < grid.size(); ++i) {
    const double k = grid.k[i];
    const double e = grid.eps[i];
    const double ek = e_quasi(e, delta);
    std::complex<double> acc(0.0, 0.0);
    for (int a = 0; a < static_cast<int>(gl.x.size()); ++a) {
      const double kpq2 = k * k + q * q + 2.0 * k * q * gl.x[a];
      const double ep = kpq2 - grid.mu;
      const double epq = e_quasi(ep, delta);
      const double de = ep - e;
      const std::complex<double> num =
          -q0c * q0c * (d2 * (e + ep) + 2.0 * e * e * e) +
          4.0 * q0c * e * ek * de * de -
          de * de * (d2 * (e - ep) + 2.0 * e * e * e);
      const std::complex<double> den =
          4.0 * ek * ek * ek * (q0c + ek - epq) * (q0c + ek - epq) *
          (q0c + ek + epq) * (q0c + ek + epq);
      acc += 0.5 * gl.w[a] * num / den;
    }
    out += grid.w[i] * acc;
  }
  return out;
}

}  // namespace

DiffusionFit diffusion_numeric(std::span<const double> qs, double gamma,
                               double density, double delta,
                               const MomentumGrid& grid, int gl_order,
                               bool negative_branch) {
  if (qs.empty())
    throw std::invalid_argument("diffusion_numeric: empty q list");
  const double gamma_n = gamma * density;
  DiffusionFit fit;
  fit.d_analytic =
      diffusion_analytic(gamma, density, grid.fermi_velocity(), delta);
  fit.regime_warning = gamma_n > 0.1 * delta;

  GaussLegendre gl(std::max(gl_order, 256));
  const double measure = grid.measure_sum();
  const double vf = grid.fermi_velocity();

  double fit_num = 0.0, fit_den = 0.0;
  for (double q : qs) {
    double q0 = bisect_root(q, delta, grid, gl_order);
    if (negative_branch) q0 = -q0;
    const double etas[3] = {0.04 * delta, 0.02 * delta, 0.01 * delta};
    std::complex<double> s[3];
    for (int j = 0; j < 3; ++j)
      s[j] = first_order_integral(q, q0, etas[j], delta, grid, gl);
    if (!std::isfinite(s[2].real()))
      throw std::runtime_error("diffusion_numeric: quadrature non-convergence");
    // Richardson in eta^... the ladder halves eta, extrapolate the last pair
    const double s0 = (4.0 * s[2].real() - s[1].real()) / 3.0;
    fit.eta_ladder_defect = std::max(
        fit.eta_ladder_defect, std::abs(s[2].real() - s[1].real()));
    const double f =
        s0 * 4.0 * std::sqrt(3.0) * delta * delta * delta / (measure * vf * q);
    fit.points.push_back({q, q0, s0, f, f / (q * q)});
    fit_num += f * q * q;
    fit_den += q * q * q * q;
  }
  fit.d_estimate = gamma_n * fit_num / fit_den;
  return fit;
}

}  // namespace oqs::collective
