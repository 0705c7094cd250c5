#pragma once

// Test-only dense matrix exponential: scaling and squaring with a Taylor
// series on the scaled matrix.  Independent of the RK4 evolution path it is
// used to check.

#include <Eigen/Dense>
#include <cmath>

inline Eigen::MatrixXcd expm_oracle(const Eigen::MatrixXcd& a) {
  const double norm = a.cwiseAbs().rowwise().sum().maxCoeff();  // inf-norm
  int squarings = 0;
  if (norm > 0.25)
    squarings = static_cast<int>(std::ceil(std::log2(norm / 0.25)));
  const Eigen::MatrixXcd b = a / std::pow(2.0, squarings);
  const Eigen::Index n = a.rows();
  Eigen::MatrixXcd term = Eigen::MatrixXcd::Identity(n, n);
  Eigen::MatrixXcd sum = term;
  for (int k = 1; k <= 60; ++k) {
    term = (term * b) / static_cast<double>(k);
    sum += term;
    if (term.cwiseAbs().maxCoeff() < 1e-18) break;
  }
  for (int s = 0; s < squarings; ++s) sum = sum * sum;
  return sum;
}
