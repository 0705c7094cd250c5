#include <doctest.h>

#include <bit>
#include <random>

#include "expm_oracle.hpp"
#include "oqs/symmetry.hpp"
#include "test_models.hpp"

using namespace oqs;
using fock::Matrix;
using fock::SparseOp;
using symmetry::SymmetryClass;

TEST_CASE("classifier: dephasing is strong, pair loss weak, drive none") {
  auto base = testmodels::hubbard(2, 1.0, 4.0, 2.0);

  auto deph = base;
  testmodels::add_dephasing(deph, 0.2);
  auto c1 = symmetry::classify(deph);
  CHECK(c1.cls == SymmetryClass::strong);
  CHECK(c1.diagnostics.hamiltonian_commutator < 1e-12);
  CHECK(c1.diagnostics.max_jump_commutator < 1e-12);

  auto loss = base;
  testmodels::add_two_body_loss(loss, 0.2);
  auto c2 = symmetry::classify(loss);
  CHECK(c2.cls == SymmetryClass::weak);
  CHECK(c2.diagnostics.max_jump_commutator > 1.0);  // not strong
  CHECK(c2.diagnostics.superop_commutator < 1e-12);

  auto drive = base;
  testmodels::add_pairing_drive(drive, 0.2);
  auto c3 = symmetry::classify(drive);
  CHECK(c3.cls == SymmetryClass::none);
  CHECK(c3.diagnostics.superop_commutator > 1e-3);
}

TEST_CASE("prediction table") {
  auto s = symmetry::predict(SymmetryClass::strong);
  CHECK(s.n_conserved);
  CHECK(s.on_conserved);
  CHECK(s.gauge_invariant);
  auto w = symmetry::predict(SymmetryClass::weak);
  CHECK(!w.n_conserved);
  CHECK(w.on_conserved);
  CHECK(w.gauge_invariant);
  auto n = symmetry::predict(SymmetryClass::none);
  CHECK(!n.n_conserved);
  CHECK(!n.on_conserved);
  CHECK(!n.gauge_invariant);
}

TEST_CASE("strong symmetry: adjoint Liouvillian annihilates N") {
  auto spec = testmodels::hubbard(2, 1.0, 4.0, 2.0);
  testmodels::add_dephasing(spec, 0.3);
  auto liou = lindblad::build_liouvillian(spec);
  Matrix n = Matrix(liou.ops.total_number());
  Matrix h = Matrix(liou.hamiltonian);
  Matrix adj = std::complex<double>(0, 1) * (h * n - n * h);
  for (std::size_t k = 0; k < liou.jump_ops.size(); ++k) {
    Matrix l = Matrix(liou.jump_ops[k]);
    Matrix ldl = l.adjoint() * l;
    adj += liou.rates[k] *
           (l.adjoint() * n * l - 0.5 * (ldl * n + n * ldl));
  }
  CHECK(adj.cwiseAbs().maxCoeff() < 1e-10);
}

TEST_CASE("weak symmetry is block diagonality across number-difference "
          "sectors") {
  auto weak_spec = testmodels::hubbard(2, 1.0, 4.0, 2.0);
  testmodels::add_two_body_loss(weak_spec, 0.2);
  auto none_spec = testmodels::hubbard(2, 1.0, 4.0, 2.0);
  testmodels::add_pairing_drive(none_spec, 0.2);

  auto off_block_norm = [](const lindblad::Liouvillian& liou) {
    const Eigen::Index d = liou.dim;
    Matrix l = Matrix(liou.matrix);
    // sector label of |i><j| is popcount(i) - popcount(j)
    std::vector<int> sector(d * d);
    for (Eigen::Index i = 0; i < d; ++i)
      for (Eigen::Index j = 0; j < d; ++j)
        sector[i * d + j] = std::popcount(static_cast<unsigned long>(i)) -
                            std::popcount(static_cast<unsigned long>(j));
    double off = 0.0;
    for (Eigen::Index a = 0; a < d * d; ++a)
      for (Eigen::Index b = 0; b < d * d; ++b)
        if (sector[a] != sector[b]) off += std::norm(l(a, b));
    return std::sqrt(off);
  };

  CHECK(off_block_norm(lindblad::build_liouvillian(weak_spec)) < 1e-12);
  CHECK(off_block_norm(lindblad::build_liouvillian(none_spec)) > 1e-3);
}

TEST_CASE("classification is invariant under number-conserving Gaussian "
          "rotations") {
  std::mt19937_64 rng(83);
  std::normal_distribution<double> g;
  fock::SiteOps ops(2);
  const Eigen::Index d = ops.dim();

  // one-body generator K = sum h_{mm'} c^dag_m c_m' with h Hermitian
  Matrix h1 = Matrix::Zero(4, 4);
  for (int a = 0; a < 4; ++a)
    for (int b = 0; b < 4; ++b) h1(a, b) = std::complex<double>(g(rng), g(rng));
  h1 = 0.5 * (h1 + h1.adjoint()).eval();
  Matrix k = Matrix::Zero(d, d);
  auto mode_op = [&](int m) -> const SparseOp& {
    return ops.annihilate(m / 2, m % 2 ? opspec::Spin::dn : opspec::Spin::up);
  };
  for (int a = 0; a < 4; ++a)
    for (int b = 0; b < 4; ++b)
      k += h1(a, b) *
           (Matrix(mode_op(a)).adjoint() * Matrix(mode_op(b)));
  Matrix u = expm_oracle(std::complex<double>(0, -1) * k);

  auto conjugate_and_classify = [&](const opspec::ModelSpec& spec) {
    auto liou = lindblad::build_liouvillian(spec);
    Matrix hc = u * Matrix(liou.hamiltonian) * u.adjoint();
    std::vector<SparseOp> jumps;
    for (const auto& l : liou.jump_ops)
      jumps.push_back(SparseOp((u * Matrix(l) * u.adjoint()).sparseView()));
    return symmetry::classify_operators(SparseOp(hc.sparseView()), jumps,
                                        liou.rates, ops.total_number());
  };

  auto strong_spec = testmodels::hubbard(2, 1.0, 4.0, 2.0);
  testmodels::add_dephasing(strong_spec, 0.2);
  CHECK(conjugate_and_classify(strong_spec).cls == SymmetryClass::strong);

  auto weak_spec = testmodels::hubbard(2, 1.0, 4.0, 2.0);
  testmodels::add_two_body_loss(weak_spec, 0.2);
  CHECK(conjugate_and_classify(weak_spec).cls == SymmetryClass::weak);

  auto none_spec = testmodels::hubbard(2, 1.0, 4.0, 2.0);
  testmodels::add_pairing_drive(none_spec, 0.2);
  CHECK(conjugate_and_classify(none_spec).cls == SymmetryClass::none);
}

TEST_CASE("simulation verdicts for the three symmetry classes") {
  lindblad::EvolveOptions eopts;
  eopts.dt0 = 5e-3;

  SUBCASE("weak: O_N conserved while N decays") {
    auto spec = testmodels::hubbard(2, 1.0, 4.0, 2.0);
    testmodels::add_two_body_loss(spec, 0.2);
    fock::SiteOps ops(2);
    Matrix rho0 = 0.5 * testmodels::dark_coherent_state(ops) +
                  0.5 * testmodels::full_state(ops);
    auto rep = symmetry::verify_by_simulation(spec, rho0, 10.0, &eopts);
    CHECK(rep.classification.cls == SymmetryClass::weak);
    CHECK(rep.on_drift < 1e-7);
    CHECK(rep.n_drift > 1e-3);
    CHECK(rep.overall == symmetry::Verdict::match);
  }
  SUBCASE("strong: both drifts vanish") {
    auto spec = testmodels::hubbard(2, 1.0, 4.0, 2.0);
    testmodels::add_dephasing(spec, 0.2);
    std::mt19937_64 rng(89);
    fock::SiteOps ops(2);
    Matrix rho0 = fock::random_block_diagonal_density(ops, rng);
    auto rep = symmetry::verify_by_simulation(spec, rho0, 10.0, &eopts);
    CHECK(rep.classification.cls == SymmetryClass::strong);
    CHECK(rep.n_drift < 1e-7);
    CHECK(rep.on_drift < 1e-7);
    CHECK(rep.overall == symmetry::Verdict::match);
  }
  SUBCASE("none: O_N moves by order one") {
    auto spec = testmodels::hubbard(2, 1.0, 4.0, 2.0);
    testmodels::add_pairing_drive(spec, 0.2);
    fock::SiteOps ops(2);
    // mix in vacuum weight: at mu = U/2 the pairing drive is particle-hole
    // symmetric, so a half-filled state would keep <N> pinned at 2
    Matrix vac = Matrix::Zero(ops.dim(), ops.dim());
    vac(0, 0) = 1.0;
    Matrix rho0 = 0.5 * testmodels::vacuum_full_superposition(ops) + 0.5 * vac;
    auto rep = symmetry::verify_by_simulation(spec, rho0, 10.0, &eopts);
    CHECK(rep.classification.cls == SymmetryClass::none);
    CHECK(rep.on_drift > 1e-3);
    CHECK(rep.overall == symmetry::Verdict::match);
  }
  SUBCASE("drift between thresholds is reported inconclusive") {
    auto spec = testmodels::hubbard(2, 1.0, 4.0, 2.0);
    testmodels::add_two_body_loss(spec, 1e-6);  // nearly closed
    std::mt19937_64 rng(97);
    fock::SiteOps ops(2);
    Matrix rho0 = fock::random_block_diagonal_density(ops, rng);
    auto rep = symmetry::verify_by_simulation(spec, rho0, 10.0, &eopts);
    // N decays a little: too much for "conserved", too little for "broken"
    CHECK(rep.n_drift > symmetry::kConservedDrift);
    CHECK(rep.n_drift < symmetry::kBrokenDrift);
    CHECK(rep.n_verdict == symmetry::Verdict::inconclusive);
    CHECK(rep.overall == symmetry::Verdict::inconclusive);
  }
}
