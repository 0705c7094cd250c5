#include "oqs/fock.hpp"

#include <bit>
#include <stdexcept>

namespace oqs::fock {

using opspec::Expr;
using opspec::OpAtom;
using opspec::Spin;

SiteOps::SiteOps(int num_sites) : num_sites_(num_sites) {
  if (num_sites < 1 || num_sites > opspec::kMaxSites)
    throw std::invalid_argument("SiteOps: capacity exceeded, num_sites = " +
                                std::to_string(num_sites) +
                                " not in [1, " +
                                std::to_string(opspec::kMaxSites) + "]");
  const int nmodes = 2 * num_sites;
  dim_ = Eigen::Index(1) << nmodes;
  c_.reserve(nmodes);
  cdag_.reserve(nmodes);
  n_.reserve(nmodes);
  for (int m = 0; m < nmodes; ++m) {
    std::vector<Eigen::Triplet<Complex>> trip;
    trip.reserve(dim_ / 2);
    const unsigned long mask = (1ul << m) - 1ul;
    for (Eigen::Index b = 0; b < dim_; ++b) {
      if (b & (Eigen::Index(1) << m)) {
        const int parity =
            std::popcount(static_cast<unsigned long>(b) & mask) & 1;
        const double sign = parity ? -1.0 : 1.0;
        trip.emplace_back(static_cast<int>(b ^ (Eigen::Index(1) << m)),
                          static_cast<int>(b), Complex(sign, 0.0));
      }
    }
    SparseOp c(dim_, dim_);
    c.setFromTriplets(trip.begin(), trip.end());
    c_.push_back(c);
    cdag_.push_back(SparseOp(c.adjoint()));
    n_.push_back(SparseOp(cdag_.back() * c));
  }
  total_number_ = SparseOp(dim_, dim_);
  for (int m = 0; m < nmodes; ++m) total_number_ += n_[m];
}

int SiteOps::mode(int site, Spin spin) const {
  if (site < 0 || site >= num_sites_)
    throw std::out_of_range("SiteOps: site index out of range");
  return 2 * site + (spin == Spin::dn ? 1 : 0);
}

const SparseOp& SiteOps::annihilate(int site, Spin spin) const {
  return c_[mode(site, spin)];
}
const SparseOp& SiteOps::create(int site, Spin spin) const {
  return cdag_[mode(site, spin)];
}
const SparseOp& SiteOps::number(int site, Spin spin) const {
  return n_[mode(site, spin)];
}

SparseOp SiteOps::site_density(int site) const {
  return SparseOp(number(site, Spin::up) + number(site, Spin::dn));
}

SparseOp compile(const Expr& expr, const SiteOps& ops) {
  switch (expr.kind()) {
    case Expr::Kind::scalar: {
      SparseOp id(ops.dim(), ops.dim());
      id.setIdentity();
      return SparseOp(expr.scalar_value() * id);
    }
    case Expr::Kind::atom: {
      const auto& a = expr.op_atom();
      switch (a.kind) {
        case OpAtom::Kind::annihilate:
          return ops.annihilate(a.site, a.spin);
        case OpAtom::Kind::create:
          return ops.create(a.site, a.spin);
        case OpAtom::Kind::number:
          return ops.number(a.site, a.spin);
      }
      break;
    }
    case Expr::Kind::product: {
      SparseOp acc;
      bool first = true;
      for (const auto& child : expr.children()) {
        if (child.kind() == Expr::Kind::scalar) {
          if (first) {
            SparseOp id(ops.dim(), ops.dim());
            id.setIdentity();
            acc = SparseOp(child.scalar_value() * id);
            first = false;
          } else {
            acc = SparseOp(child.scalar_value() * acc);
          }
          continue;
        }
        SparseOp m = compile(child, ops);
        acc = first ? m : SparseOp(acc * m);
        first = false;
      }
      return acc;
    }
    case Expr::Kind::sum: {
      SparseOp acc(ops.dim(), ops.dim());
      for (const auto& child : expr.children()) acc += compile(child, ops);
      return acc;
    }
  }
  throw std::logic_error("compile: unreachable");
}

Vector vectorize(const Matrix& rho) {
  const Eigen::Index d = rho.rows();
  if (rho.cols() != d) throw std::invalid_argument("vectorize: not square");
  Vector v(d * d);
  for (Eigen::Index i = 0; i < d; ++i)
    for (Eigen::Index j = 0; j < d; ++j) v(i * d + j) = rho(i, j);
  return v;
}

Matrix devectorize(const Vector& v, Eigen::Index dim) {
  if (v.size() != dim * dim)
    throw std::invalid_argument("devectorize: dimension mismatch");
  Matrix rho(dim, dim);
  for (Eigen::Index i = 0; i < dim; ++i)
    for (Eigen::Index j = 0; j < dim; ++j) rho(i, j) = v(i * dim + j);
  return rho;
}

SparseOp kronecker(const SparseOp& a, const SparseOp& b) {
  const Eigen::Index ar = a.rows(), ac = a.cols();
  const Eigen::Index br = b.rows(), bc = b.cols();
  std::vector<Eigen::Triplet<Complex>> trip;
  trip.reserve(static_cast<std::size_t>(a.nonZeros()) * b.nonZeros());
  for (int ka = 0; ka < a.outerSize(); ++ka)
    for (SparseOp::InnerIterator ia(a, ka); ia; ++ia)
      for (int kb = 0; kb < b.outerSize(); ++kb)
        for (SparseOp::InnerIterator ib(b, kb); ib; ++ib)
          trip.emplace_back(static_cast<int>(ia.row() * br + ib.row()),
                            static_cast<int>(ia.col() * bc + ib.col()),
                            ia.value() * ib.value());
  SparseOp out(ar * br, ac * bc);
  out.setFromTriplets(trip.begin(), trip.end());
  return out;
}

SparseOp swap_operator(Eigen::Index dim) {
  if (dim < 1) throw std::invalid_argument("swap_operator: dim must be >= 1");
  std::vector<Eigen::Triplet<Complex>> trip;
  trip.reserve(static_cast<std::size_t>(dim) * dim);
  for (Eigen::Index i = 0; i < dim; ++i)
    for (Eigen::Index j = 0; j < dim; ++j)
      trip.emplace_back(static_cast<int>(i * dim + j),
                        static_cast<int>(j * dim + i), Complex(1.0, 0.0));
  SparseOp s(dim * dim, dim * dim);
  s.setFromTriplets(trip.begin(), trip.end());
  return s;
}

Matrix random_density_matrix(Eigen::Index dim, std::mt19937_64& rng) {
  std::normal_distribution<double> gauss(0.0, 1.0);
  Matrix g(dim, dim);
  for (Eigen::Index i = 0; i < dim; ++i)
    for (Eigen::Index j = 0; j < dim; ++j)
      g(i, j) = Complex(gauss(rng), gauss(rng));
  Matrix rho = g * g.adjoint();
  rho /= rho.trace().real();
  return rho;
}

Matrix random_block_diagonal_density(const SiteOps& ops,
                                     std::mt19937_64& rng) {
  const Eigen::Index dim = ops.dim();
  Matrix rho = random_density_matrix(dim, rng);
  // particle number of basis state b is its popcount
  for (Eigen::Index i = 0; i < dim; ++i)
    for (Eigen::Index j = 0; j < dim; ++j)
      if (std::popcount(static_cast<unsigned long>(i)) !=
          std::popcount(static_cast<unsigned long>(j)))
        rho(i, j) = 0.0;
  rho /= rho.trace().real();
  return rho;
}

DensityCheck check_density(const Matrix& rho) {
  DensityCheck out{};
  out.hermiticity_error = (rho - rho.adjoint()).cwiseAbs().maxCoeff();
  out.trace_error = std::abs(rho.trace() - Complex(1.0, 0.0));
  Eigen::SelfAdjointEigenSolver<Matrix> es(
      Matrix(0.5 * (rho + rho.adjoint())), Eigen::EigenvaluesOnly);
  out.min_eigenvalue = es.eigenvalues().minCoeff();
  return out;
}

}  // namespace oqs::fock
