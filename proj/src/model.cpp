#include "lpnet/model.hpp"

#include "lpnet/so3.hpp"

namespace lpnet {

double rb_hamiltonian(const Network& net, const LatticeState& s) {
  double kinetic = 0.0, interaction = 0.0;
  for (int i = 0; i < net.nodes(); ++i) {
    kinetic += 0.5 * s.momentum[i].dot(net.inertia_inv(i) * s.momentum[i]);
  }
  for (int e = 0; e < net.edge_count(); ++e) {
    const auto [a, b] = net.edges()[e];
    interaction +=
        net.edge_weight(e) * s.momentum[a].dot(net.coupling(e) * s.momentum[b]);
  }
  return kinetic - interaction;
}

double ht_kinetic_energy(const Network& net, const LatticeState& s) {
  double kinetic = 0.0;
  for (int i = 0; i < net.nodes(); ++i) {
    kinetic += 0.5 * s.momentum[i].dot(net.inertia_inv(i) * s.momentum[i]);
  }
  return kinetic;
}

double ht_interaction_energy(const Network& net, const LatticeState& s) {
  double interaction = 0.0;
  for (int e = 0; e < net.edge_count(); ++e) {
    const auto [a, b] = net.edges()[e];
    interaction +=
        net.edge_weight(e) * s.position[a].dot(net.coupling(e) * s.position[b]);
  }
  return -interaction;
}

double ht_hamiltonian(const Network& net, const LatticeState& s) {
  return ht_kinetic_energy(net, s) + ht_interaction_energy(net, s);
}

void rb_rhs_into(const Network& net, const LatticeState& s, LatticeState& out) {
  const int n = net.nodes();
  out.momentum.resize(n);
  out.position.clear();
  // dPi_i/dt = Pi_i x (L Pi)_i, expanded as the neighbour sum.
  for (int i = 0; i < n; ++i) {
    Eigen::Vector3d field = net.inertia_inv(i) * s.momentum[i];
    for (const auto& [j, e] : net.neighbors(i)) {
      field.noalias() -= net.edge_weight(e) * (net.coupling(e) * s.momentum[j]);
    }
    out.momentum[i] = s.momentum[i].cross(field);
  }
}

void rb_dissipation_into(const Network& net, const LatticeState& s,
                         LatticeState& out) {
  const int n = net.nodes();
  out.momentum.resize(n);
  out.position.clear();
  // Pi_i x (Pi_i x (L Pi)_i): tangent to each momentum sphere, energy
  // decreasing.
  for (int i = 0; i < n; ++i) {
    Eigen::Vector3d field = net.inertia_inv(i) * s.momentum[i];
    for (const auto& [j, e] : net.neighbors(i)) {
      field.noalias() -= net.edge_weight(e) * (net.coupling(e) * s.momentum[j]);
    }
    out.momentum[i] = s.momentum[i].cross(s.momentum[i].cross(field));
  }
}

void ht_rhs_into(const Network& net, const LatticeState& s, LatticeState& out) {
  const int n = net.nodes();
  out.momentum.resize(n);
  out.position.resize(n);
  for (int i = 0; i < n; ++i) {
    Eigen::Vector3d chi = Eigen::Vector3d::Zero();
    for (const auto& [j, e] : net.neighbors(i)) {
      chi.noalias() += net.edge_weight(e) * (net.coupling(e) * s.position[j]);
    }
    const Eigen::Vector3d omega = net.inertia_inv(i) * s.momentum[i];
    out.momentum[i] = s.momentum[i].cross(omega) - s.position[i].cross(chi);
    out.position[i] = s.position[i].cross(omega);
  }
}

void ht_dissipation_into(const Network& net, const LatticeState& s,
                         LatticeState& out) {
  const int n = net.nodes();
  out.momentum.resize(n);
  out.position.resize(n);
  // Double-bracket field paired with the isotropic noise channels
  // X_l = (Pi x e_l, Gamma x e_l):  D = -sum_l X_l <X_l, grad h>, which is
  // the unique field that conserves both per-node Casimirs, dissipates
  // energy, and balances the noise so that exp(-beta h) is stationary.
  // It vanishes at the spectral equilibria Pi = -lambda1 I Gamma.
  for (int i = 0; i < n; ++i) {
    Eigen::Vector3d chi = Eigen::Vector3d::Zero();
    for (const auto& [j, e] : net.neighbors(i)) {
      chi.noalias() += net.edge_weight(e) * (net.coupling(e) * s.position[j]);
    }
    const Eigen::Vector3d& pi = s.momentum[i];
    const Eigen::Vector3d& gamma = s.position[i];
    const Eigen::Vector3d omega = net.inertia_inv(i) * pi;
    const Eigen::Vector3d torque = pi.cross(omega) + chi.cross(gamma);
    out.momentum[i] = pi.cross(torque);
    out.position[i] = gamma.cross(torque);
  }
}

LatticeState rb_rhs(const Network& net, const LatticeState& s) {
  LatticeState out;
  rb_rhs_into(net, s, out);
  return out;
}
LatticeState ht_rhs(const Network& net, const LatticeState& s) {
  LatticeState out;
  ht_rhs_into(net, s, out);
  return out;
}
LatticeState rb_dissipation(const Network& net, const LatticeState& s) {
  LatticeState out;
  rb_dissipation_into(net, s, out);
  return out;
}
LatticeState ht_dissipation(const Network& net, const LatticeState& s) {
  LatticeState out;
  ht_dissipation_into(net, s, out);
  return out;
}

double hamiltonian(const Network& net, const LatticeState& s) {
  return s.kind() == ModelKind::RigidBody ? rb_hamiltonian(net, s)
                                          : ht_hamiltonian(net, s);
}
void rhs_into(const Network& net, const LatticeState& s, LatticeState& out) {
  if (s.kind() == ModelKind::RigidBody) rb_rhs_into(net, s, out);
  else ht_rhs_into(net, s, out);
}
void dissipation_into(const Network& net, const LatticeState& s,
                      LatticeState& out) {
  if (s.kind() == ModelKind::RigidBody) rb_dissipation_into(net, s, out);
  else ht_dissipation_into(net, s, out);
}

}  // namespace lpnet
