#pragma once

#include "lpnet/laplacian.hpp"
#include "lpnet/network.hpp"
#include "lpnet/state.hpp"

// Hamiltonians, Lie-Poisson vector fields and double-bracket dissipation
// fields for the momentum-coupled (rigid body) and position-coupled
// (heavy top) networks.
//
// Dissipation fields are unit-amplitude; the integrator scales them by the
// dissipation parameter theta. They conserve every per-node Casimir
// exactly, make the energy non-increasing,
//   rigid body:  dh/dt = -theta * sum_i |(L Pi)_i x Pi_i|^2
//   heavy top :  dh/dt = -theta * sum_i |Pi_i x Omega_i + chi_i x Gamma_i|^2
// with chi_i = sum_{j~i} J_ij Gamma_j / sqrt(d_i d_j), and pair with the
// isotropic noise channels so that the Gibbs density exp(-2 theta h /
// sigma^2) is stationary on the orbit.

namespace lpnet {

double rb_hamiltonian(const Network& net, const LatticeState& s);
double ht_hamiltonian(const Network& net, const LatticeState& s);

/// Kinetic and interaction parts of the heavy-top energy, reported
/// separately (diagnostics for the metastability runs).
double ht_kinetic_energy(const Network& net, const LatticeState& s);
double ht_interaction_energy(const Network& net, const LatticeState& s);

void rb_rhs_into(const Network& net, const LatticeState& s, LatticeState& out);
void ht_rhs_into(const Network& net, const LatticeState& s, LatticeState& out);
void rb_dissipation_into(const Network& net, const LatticeState& s,
                         LatticeState& out);
void ht_dissipation_into(const Network& net, const LatticeState& s,
                         LatticeState& out);

LatticeState rb_rhs(const Network& net, const LatticeState& s);
LatticeState ht_rhs(const Network& net, const LatticeState& s);
LatticeState rb_dissipation(const Network& net, const LatticeState& s);
LatticeState ht_dissipation(const Network& net, const LatticeState& s);

/// Variant dispatchers.
double hamiltonian(const Network& net, const LatticeState& s);
void rhs_into(const Network& net, const LatticeState& s, LatticeState& out);
void dissipation_into(const Network& net, const LatticeState& s,
                      LatticeState& out);

}  // namespace lpnet
