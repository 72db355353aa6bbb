#pragma once

#include <cmath>
#include <vector>

#include <Eigen/Dense>

#include "lpnet/network.hpp"

namespace lpnet {

enum class ModelKind { RigidBody, HeavyTop };

/// Per-node state: momentum II_i, plus advected position Gamma_i in the
/// heavy-top variant (position empty <=> rigid body).
struct LatticeState {
  std::vector<Eigen::Vector3d> momentum;
  std::vector<Eigen::Vector3d> position;

  ModelKind kind() const {
    return position.empty() ? ModelKind::RigidBody : ModelKind::HeavyTop;
  }
  int size() const { return static_cast<int>(momentum.size()); }

  bool finite() const {
    for (const auto& v : momentum) {
      if (!v.allFinite()) return false;
    }
    for (const auto& v : position) {
      if (!v.allFinite()) return false;
    }
    return true;
  }

  static LatticeState rigid_body(int n) {
    LatticeState s;
    s.momentum.assign(n, Eigen::Vector3d::Zero());
    return s;
  }
  static LatticeState heavy_top(int n) {
    LatticeState s;
    s.momentum.assign(n, Eigen::Vector3d::Zero());
    s.position.assign(n, Eigen::Vector3d::Zero());
    return s;
  }
};

/// Per-node Casimir values. Rigid body: c1_i = |Pi_i|^2 / 2 (c2 empty).
/// Heavy top: c1_i = Pi_i . Gamma_i, c2_i = |Gamma_i|^2.
struct CasimirLevels {
  std::vector<double> c1;
  std::vector<double> c2;
  double total1 = 0.0;
  double total2 = 0.0;
};

inline CasimirLevels casimir_levels(const LatticeState& s) {
  CasimirLevels c;
  const int n = s.size();
  c.c1.resize(n);
  if (s.kind() == ModelKind::RigidBody) {
    for (int i = 0; i < n; ++i) {
      c.c1[i] = 0.5 * s.momentum[i].squaredNorm();
      c.total1 += c.c1[i];
    }
  } else {
    c.c2.resize(n);
    for (int i = 0; i < n; ++i) {
      c.c1[i] = s.momentum[i].dot(s.position[i]);
      c.c2[i] = s.position[i].squaredNorm();
      c.total1 += c.c1[i];
      c.total2 += c.c2[i];
    }
  }
  return c;
}

/// Node average of the momenta (the magnetisation observable for the rigid
/// body network).
inline Eigen::Vector3d mean_momentum(const LatticeState& s) {
  Eigen::Vector3d m = Eigen::Vector3d::Zero();
  for (const auto& v : s.momentum) m += v;
  return m / static_cast<double>(s.size());
}

/// Node average of the positions (heavy-top order parameter); zero for the
/// rigid body variant.
inline Eigen::Vector3d mean_position(const LatticeState& s) {
  if (s.position.empty()) return Eigen::Vector3d::Zero();
  Eigen::Vector3d m = Eigen::Vector3d::Zero();
  for (const auto& v : s.position) m += v;
  return m / static_cast<double>(s.size());
}

}  // namespace lpnet
