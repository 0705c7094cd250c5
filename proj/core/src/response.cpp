#include "oqs/response.hpp"

#include <cmath>

namespace oqs::response {

namespace {

constexpr double kPoleGuard = 1e-14;

}  // namespace

Matrix2 NambuGreens::evaluate(GreensKind kind, double omega, double k) const {
  const double e = eps(k);
  const double e2 = e * e + delta * delta;
  const double g = gamma_n;
  const Complex ih(0.0, 0.5 * g);

  switch (kind) {
    case GreensKind::retarded: {
      const Complex den = (omega + ih) * (omega + ih) - e2;
      if (std::abs(den) < kPoleGuard)
        throw SingularPoint("greens: retarded denominator at a pole");
      Matrix2 m;
      m << omega + e + ih, delta, delta, omega - e + ih;
      return m / den;
    }
    case GreensKind::advanced: {
      const Complex den = (omega - ih) * (omega - ih) - e2;
      if (std::abs(den) < kPoleGuard)
        throw SingularPoint("greens: advanced denominator at a pole");
      Matrix2 m;
      m << omega + e - ih, delta, delta, omega - e - ih;
      return m / den;
    }
    case GreensKind::lesser: {
      const double a = std::pow(omega * omega - e2 - 0.25 * g * g, 2) +
                       omega * omega * g * g;
      if (a < kPoleGuard * kPoleGuard)
        throw SingularPoint("greens: lesser denominator at a pole");
      const Complex ig(0.0, g);
      Matrix2 m;
      m << ig * delta * delta, ig * delta * (e - omega),
          ig * delta * (e - omega), ig * (e - omega) * (e - omega);
      return m / a;
    }
    case GreensKind::time_ordered:
      return evaluate(GreensKind::retarded, omega, k) +
             evaluate(GreensKind::lesser, omega, k);
  }
  throw std::logic_error("greens: unreachable");
}

Matrix2 wt_vertex_lhs(const NambuGreens& g, double k, double q, double omega,
                      double omega_plus_q0) {
  const Matrix2 gr_k = g.evaluate(GreensKind::retarded, omega, k);
  const Matrix2 gr_kq = g.evaluate(GreensKind::retarded, omega_plus_q0, k + q);
  Matrix2 tau3;
  tau3 << 1.0, 0.0, 0.0, -1.0;
  return gr_k.inverse() * tau3 - tau3 * gr_kq.inverse();
}

Matrix2 wt_vertex_rhs(const NambuGreens& g, double k, double q, double q0) {
  const double de = g.eps(k + q) - g.eps(k);
  Matrix2 out;
  // de * tau_0 - q0 * tau_3 + 2 i delta tau_2
  out << de - q0, 2.0 * g.delta, -2.0 * g.delta, de + q0;
  return out;
}

double wt_vertex_check(const NambuGreens& g, double k, double q, double omega,
                       double omega_plus_q0) {
  const Matrix2 lhs = wt_vertex_lhs(g, k, q, omega, omega_plus_q0);
  const Matrix2 rhs = wt_vertex_rhs(g, k, q, omega_plus_q0 - omega);
  return (lhs - rhs).norm();
}

ResponseCurrent response_current(const Eigen::Vector3d& q,
                                 const Eigen::Vector3cd& a, double density,
                                 double mass) {
  const double q2 = q.squaredNorm();
  if (q2 == 0.0)
    throw std::invalid_argument(
        "response_current: transverse projector undefined at q = 0");
  if (mass <= 0.0)
    throw std::invalid_argument("response_current: mass must be > 0");
  const Complex qa = q.cast<Complex>().dot(a);  // sum_j q_j a_j
  ResponseCurrent out;
  out.spatial = -(density / mass) * (a - (qa / q2) * q.cast<Complex>());
  out.temporal = Complex(0.0, 0.0);
  return out;
}

double density_from_greens(double delta, const MomentumGrid& grid) {
  double n = 0.0;
  for (int i = 0; i < grid.size(); ++i) {
    const double e = grid.eps[i];
    n += grid.w[i] * (1.0 - e / std::hypot(e, delta));
  }
  return n;
}

}  // namespace oqs::response
