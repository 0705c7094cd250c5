#pragma once

#include <cmath>
#include <stdexcept>
#include <vector>

namespace oqs {

// Radial momentum grid for the mean-field and response tiers.
//
// Units: hbar = 1 and eps(k) = k^2 - mu, which fixes the fermion mass to
// m = 1/2; hence k_F = sqrt(mu) and v_F = k_F / m = 2 sqrt(mu).  Weights
// carry the 3D measure, w_k = k^2 dk / (2 pi^2), so that
// Int d^3k/(2pi)^3 f(|k|) = sum_k w_k f(k) for isotropic f.
struct MomentumGrid {
  std::vector<double> k;
  std::vector<double> w;
  std::vector<double> eps;
  double mu = 1.0;
  double cutoff = 3.0;

  static MomentumGrid make_uniform(int n, double mu, double cutoff) {
    if (n < 1) throw std::invalid_argument("MomentumGrid: n must be >= 1");
    if (cutoff <= 0.0)
      throw std::invalid_argument("MomentumGrid: cutoff must be > 0");
    MomentumGrid g;
    g.mu = mu;
    g.cutoff = cutoff;
    const double dk = cutoff / n;
    g.k.resize(n);
    g.w.resize(n);
    g.eps.resize(n);
    for (int i = 0; i < n; ++i) {
      const double ki = (i + 0.5) * dk;
      g.k[i] = ki;
      g.w[i] = ki * ki * dk / (2.0 * M_PI * M_PI);
      g.eps[i] = ki * ki - mu;
    }
    return g;
  }

  int size() const { return static_cast<int>(k.size()); }
  double mass() const { return 0.5; }
  double fermi_momentum() const { return std::sqrt(mu); }
  double fermi_velocity() const { return fermi_momentum() / mass(); }
  double measure_sum() const {
    double s = 0.0;
    for (double wi : w) s += wi;
    return s;
  }
};

}  // namespace oqs
