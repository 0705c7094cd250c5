#include "oqs/symmetry.hpp"

#include <cmath>

namespace oqs::symmetry {

using fock::SparseOp;

std::string to_string(SymmetryClass c) {
  switch (c) {
    case SymmetryClass::strong: return "Strong";
    case SymmetryClass::weak: return "Weak";
    case SymmetryClass::none: return "None";
  }
  return {};
}

std::string to_string(Verdict v) {
  switch (v) {
    case Verdict::match: return "match";
    case Verdict::mismatch: return "mismatch";
    case Verdict::inconclusive: return "inconclusive";
  }
  return {};
}

namespace {

double commutator_norm(const SparseOp& a, const SparseOp& b) {
  return SparseOp(SparseOp(a * b) - SparseOp(b * a)).norm();
}

SparseOp liouvillian_matrix(const SparseOp& hamiltonian,
                            const std::vector<SparseOp>& jumps,
                            const std::vector<double>& rates) {
  const Eigen::Index dim = hamiltonian.rows();
  SparseOp id(dim, dim);
  id.setIdentity();
  SparseOp lmat(fock::Complex(0.0, -1.0) *
                (fock::kronecker(hamiltonian, id) -
                 fock::kronecker(id, SparseOp(hamiltonian.transpose()))));
  for (std::size_t k = 0; k < jumps.size(); ++k) {
    const SparseOp& l = jumps[k];
    SparseOp ldl(SparseOp(l.adjoint()) * l);
    lmat += rates[k] *
            SparseOp(fock::kronecker(l, SparseOp(l.conjugate())) -
                     0.5 * (fock::kronecker(ldl, id) +
                            fock::kronecker(id, SparseOp(ldl.transpose()))));
  }
  return lmat;
}

}  // namespace

Classification classify_operators(const SparseOp& hamiltonian,
                                  const std::vector<SparseOp>& jumps,
                                  const std::vector<double>& rates,
                                  const SparseOp& number_op) {
  Classification out{SymmetryClass::none, {}};
  out.diagnostics.hamiltonian_commutator =
      commutator_norm(hamiltonian, number_op);
  for (const auto& l : jumps)
    out.diagnostics.max_jump_commutator =
        std::max(out.diagnostics.max_jump_commutator,
                 commutator_norm(l, number_op));

  const Eigen::Index dim = hamiltonian.rows();
  SparseOp id(dim, dim);
  id.setIdentity();
  SparseOp nsup(fock::kronecker(number_op, id) -
                fock::kronecker(id, SparseOp(number_op.transpose())));
  SparseOp lmat = liouvillian_matrix(hamiltonian, jumps, rates);
  out.diagnostics.superop_commutator = commutator_norm(nsup, lmat);

  if (out.diagnostics.hamiltonian_commutator < kSymmetricTol &&
      out.diagnostics.max_jump_commutator < kSymmetricTol)
    out.cls = SymmetryClass::strong;
  else if (out.diagnostics.superop_commutator < kSymmetricTol)
    out.cls = SymmetryClass::weak;
  else
    out.cls = SymmetryClass::none;
  return out;
}

Classification classify(const opspec::ModelSpec& spec) {
  lindblad::Liouvillian liou = lindblad::build_liouvillian(spec);
  return classify_operators(liou.hamiltonian, liou.jump_ops, liou.rates,
                            liou.ops.total_number());
}

Prediction predict(SymmetryClass c) {
  switch (c) {
    case SymmetryClass::strong: return {true, true, true};
    case SymmetryClass::weak: return {false, true, true};
    case SymmetryClass::none: return {false, false, false};
  }
  return {};
}

namespace {

Verdict drift_verdict(double drift, bool predicted_conserved) {
  if (drift < kConservedDrift)
    return predicted_conserved ? Verdict::match : Verdict::mismatch;
  if (drift > kBrokenDrift)
    return predicted_conserved ? Verdict::mismatch : Verdict::match;
  return Verdict::inconclusive;
}

}  // namespace

SimulationReport verify_by_simulation(const opspec::ModelSpec& spec,
                                      const fock::Matrix& rho0,
                                      double total_time,
                                      const lindblad::EvolveOptions* opts) {
  SimulationReport rep;
  rep.classification = classify(spec);
  rep.prediction = predict(rep.classification.cls);

  lindblad::Liouvillian liou = lindblad::build_liouvillian(spec);
  lindblad::EvolveOptions o;
  if (opts) o = *opts;
  o.total_time = total_time;
  lindblad::Trajectory traj = lindblad::evolve(liou, rho0, o);

  const auto& first = traj.records.front();
  for (const auto& rec : traj.records) {
    rep.n_drift = std::max(rep.n_drift, std::abs(rec.n_total - first.n_total));
    rep.on_drift =
        std::max(rep.on_drift, std::abs(rec.on_direct - first.on_direct));
  }
  rep.n_verdict = drift_verdict(rep.n_drift, rep.prediction.n_conserved);
  rep.on_verdict = drift_verdict(rep.on_drift, rep.prediction.on_conserved);
  if (rep.n_verdict == Verdict::mismatch ||
      rep.on_verdict == Verdict::mismatch)
    rep.overall = Verdict::mismatch;
  else if (rep.n_verdict == Verdict::inconclusive ||
           rep.on_verdict == Verdict::inconclusive)
    rep.overall = Verdict::inconclusive;
  else
    rep.overall = Verdict::match;
  return rep;
}

}  // namespace oqs::symmetry
