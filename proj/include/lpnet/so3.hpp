#pragma once

#include <Eigen/Dense>

// Kernels for so(3) identified with R^3. The dual is identified with the
// algebra through the Euclidean dot product, so ad is the cross product and
// the coadjoint action is its transpose partner.

namespace lpnet::so3 {

/// Element of so(3)* ~ R^3 (momentum, position, or noise direction).
using AlgebraVector = Eigen::Vector3d;

/// Skew-symmetric 3x3 image of the hat isomorphism.
using HatMatrix = Eigen::Matrix3d;

/// Adjoint action ad_xi(eta) = xi x eta.
inline AlgebraVector ad(const AlgebraVector& xi, const AlgebraVector& eta) {
  return xi.cross(eta);
}

/// Coadjoint action, defined by <coad(xi,mu), eta> = <mu, ad(xi,eta)>.
/// Under the dot-product pairing this is mu x xi.
inline AlgebraVector coad(const AlgebraVector& xi, const AlgebraVector& mu) {
  return mu.cross(xi);
}

/// Pairing between the algebra and its dual (Euclidean dot product).
inline double pairing(const AlgebraVector& a, const AlgebraVector& b) {
  return a.dot(b);
}

/// hat(v) w = v x w for all w.
inline HatMatrix hat(const AlgebraVector& v) {
  HatMatrix m;
  // clang-format off
  m <<     0.0, -v.z(),  v.y(),
         v.z(),    0.0, -v.x(),
        -v.y(),  v.x(),    0.0;
  // clang-format on
  return m;
}

}  // namespace lpnet::so3
