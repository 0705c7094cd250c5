#pragma once

#include <string>
#include <vector>

#include "oqs/lindblad.hpp"

namespace oqs::symmetry {

enum class SymmetryClass { strong, weak, none };

std::string to_string(SymmetryClass c);

// Numerical thresholds: commutator norms below kSymmetricTol count as zero;
// observable drifts above kBrokenDrift count as broken, below kConservedDrift
// as conserved, anything between is inconclusive.
inline constexpr double kSymmetricTol = 1e-10;
inline constexpr double kConservedDrift = 1e-7;
inline constexpr double kBrokenDrift = 1e-3;

struct Diagnostics {
  double hamiltonian_commutator = 0.0;      // ||[H, N]||_F
  double max_jump_commutator = 0.0;         // max_k ||[L_k, N]||_F
  double superop_commutator = 0.0;          // ||[N_sup, L]||_F
};

struct Classification {
  SymmetryClass cls;
  Diagnostics diagnostics;
};

// Strong iff [H, N] = 0 and [L_k, N] = 0 for every jump operator; weak iff
// the Liouvillian commutes with the phase-rotation superoperator
// N (x) I - I (x) N^T; none otherwise.
Classification classify(const opspec::ModelSpec& spec);

// Same test on prebuilt operators (used for basis-independence checks).
Classification classify_operators(const fock::SparseOp& hamiltonian,
                                  const std::vector<fock::SparseOp>& jumps,
                                  const std::vector<double>& rates,
                                  const fock::SparseOp& number_op);

struct Prediction {
  bool n_conserved;
  bool on_conserved;
  bool gauge_invariant;
};

Prediction predict(SymmetryClass c);

enum class Verdict { match, mismatch, inconclusive };

std::string to_string(Verdict v);

struct SimulationReport {
  double n_drift = 0.0;
  double on_drift = 0.0;
  Verdict n_verdict = Verdict::inconclusive;
  Verdict on_verdict = Verdict::inconclusive;
  Verdict overall = Verdict::inconclusive;
  Classification classification{SymmetryClass::none, {}};
  Prediction prediction{};
};

// Evolves rho0 for total_time, measures max drifts of <N> and O_N, and
// compares them against the Table-driven prediction for the classified
// symmetry.  Drifts in the open interval (kConservedDrift, kBrokenDrift)
// yield an inconclusive verdict rather than a silent pass.
SimulationReport verify_by_simulation(const opspec::ModelSpec& spec,
                                      const fock::Matrix& rho0,
                                      double total_time,
                                      const lindblad::EvolveOptions* opts =
                                          nullptr);

}  // namespace oqs::symmetry
