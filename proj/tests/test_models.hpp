#pragma once

// Shared model and state builders for the test suites.

#include <cmath>
#include <random>
#include <string>

#include "oqs/fock.hpp"
#include "oqs/opspec.hpp"

namespace testmodels {

inline oqs::opspec::ModelSpec hubbard(int sites, double j, double u,
                                      double mu) {
  oqs::opspec::ModelSpec spec;
  spec.num_sites = sites;
  spec.hopping = j;
  spec.interaction = u;
  spec.chemical_potential = mu;
  return spec;
}

inline void add_two_body_loss(oqs::opspec::ModelSpec& spec, double gamma) {
  using oqs::opspec::Expr;
  using oqs::opspec::OpAtom;
  using oqs::opspec::Spin;
  for (int r = 0; r < spec.num_sites; ++r)
    spec.dissipators.push_back(
        {"loss" + std::to_string(r), gamma,
         Expr::product({Expr::atom(OpAtom::Kind::annihilate, r, Spin::dn),
                        Expr::atom(OpAtom::Kind::annihilate, r, Spin::up)})});
}

inline void add_dephasing(oqs::opspec::ModelSpec& spec, double gamma) {
  using oqs::opspec::Expr;
  using oqs::opspec::OpAtom;
  using oqs::opspec::Spin;
  for (int r = 0; r < spec.num_sites; ++r)
    spec.dissipators.push_back(
        {"dephase" + std::to_string(r), gamma,
         Expr::sum({Expr::atom(OpAtom::Kind::number, r, Spin::up),
                    Expr::atom(OpAtom::Kind::number, r, Spin::dn)})});
}

inline void add_pairing_drive(oqs::opspec::ModelSpec& spec, double gamma) {
  using oqs::opspec::Expr;
  using oqs::opspec::OpAtom;
  using oqs::opspec::Spin;
  for (int r = 0; r < spec.num_sites; ++r)
    spec.dissipators.push_back(
        {"pair" + std::to_string(r), gamma,
         Expr::sum(
             {Expr::product({Expr::atom(OpAtom::Kind::annihilate, r, Spin::up),
                             Expr::atom(OpAtom::Kind::annihilate, r,
                                        Spin::dn)}),
              Expr::product({Expr::atom(OpAtom::Kind::create, r, Spin::up),
                             Expr::atom(OpAtom::Kind::create, r,
                                        Spin::dn)})})});
}

// Pure superposition of the vacuum with a single up-particle on site 0.
// Two-body loss annihilates every component, so the number coherence in
// this state survives the dissipative flow exactly.
inline oqs::fock::Matrix dark_coherent_state(const oqs::fock::SiteOps& ops) {
  oqs::fock::Vector psi = oqs::fock::Vector::Zero(ops.dim());
  psi(0) = 1.0 / std::sqrt(2.0);
  psi(1) = 1.0 / std::sqrt(2.0);  // mode 0 = (site 0, up) occupied
  return psi * psi.adjoint();
}

// Projector on the fully occupied lattice.
inline oqs::fock::Matrix full_state(const oqs::fock::SiteOps& ops) {
  oqs::fock::Vector psi = oqs::fock::Vector::Zero(ops.dim());
  psi(ops.dim() - 1) = 1.0;
  return psi * psi.adjoint();
}

// Pure superposition of vacuum and the fully occupied lattice: maximal
// particle-number coherence.
inline oqs::fock::Matrix vacuum_full_superposition(
    const oqs::fock::SiteOps& ops) {
  oqs::fock::Vector psi = oqs::fock::Vector::Zero(ops.dim());
  psi(0) = 1.0 / std::sqrt(2.0);
  psi(ops.dim() - 1) = 1.0 / std::sqrt(2.0);
  return psi * psi.adjoint();
}

}  // namespace testmodels
