#pragma once

#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <complex>
#include <random>
#include <vector>

#include "oqs/opspec.hpp"

namespace oqs::fock {

using Complex = std::complex<double>;
using SparseOp = Eigen::SparseMatrix<Complex>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;

// Jordan-Wigner site operators on the 4^L Fock space.
//
// Mode ordering is site-major with spin-up before spin-down, so mode
// m = 2*site + (spin == dn).  Basis states are little-endian occupation
// bitstrings over modes, and the JW string acts on all earlier modes:
//   c_m |b> = (-1)^{popcount(b & (2^m - 1))} |b without bit m>.
class SiteOps {
 public:
  explicit SiteOps(int num_sites);  // throws std::invalid_argument on capacity

  int num_sites() const { return num_sites_; }
  Eigen::Index dim() const { return dim_; }

  const SparseOp& annihilate(int site, opspec::Spin spin) const;
  const SparseOp& create(int site, opspec::Spin spin) const;
  const SparseOp& number(int site, opspec::Spin spin) const;
  SparseOp site_density(int site) const;  // n_{r,up} + n_{r,dn}
  const SparseOp& total_number() const { return total_number_; }

 private:
  int mode(int site, opspec::Spin spin) const;
  int num_sites_;
  Eigen::Index dim_;
  std::vector<SparseOp> c_, cdag_, n_;
  SparseOp total_number_;
};

// Compiles an operator expression to its matrix on the Fock space.
SparseOp compile(const opspec::Expr& expr, const SiteOps& ops);

// Row-major vectorization |rho>> = sum_ij rho_ij |i>|j>, so that the
// superoperator action A rho B maps to (A (x) B^T) vec(rho).
Vector vectorize(const Matrix& rho);
Matrix devectorize(const Vector& v, Eigen::Index dim);

// Kronecker product in the same compound-index convention as vectorize.
SparseOp kronecker(const SparseOp& a, const SparseOp& b);

// S = sum_ij |i><j| (x) |j><i|; S^2 = I, S(x (x) y) = y (x) x.
SparseOp swap_operator(Eigen::Index dim);

// Ginibre-distributed density matrix: G G^dag / Tr.
Matrix random_density_matrix(Eigen::Index dim, std::mt19937_64& rng);

// Random density matrix that is block diagonal in total particle number.
Matrix random_block_diagonal_density(const SiteOps& ops, std::mt19937_64& rng);

struct DensityCheck {
  double hermiticity_error;  // max |rho - rho^dag|
  double trace_error;        // |Tr rho - 1|
  double min_eigenvalue;
  bool ok(double positivity_floor = -1e-10) const {
    return hermiticity_error < 1e-12 && trace_error < 1e-12 &&
           min_eigenvalue > positivity_floor;
  }
};

DensityCheck check_density(const Matrix& rho);

}  // namespace oqs::fock
