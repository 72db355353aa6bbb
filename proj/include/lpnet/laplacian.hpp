#pragma once

#include <vector>

#include <Eigen/Dense>

#include "lpnet/network.hpp"

namespace lpnet {

enum class Coupling { Momentum, Position };

/// Dense symmetric 3N x 3N block operator acting on stacked states.
/// Momentum flavour: Ibar^-1 - D^{-1/2} A D^{-1/2}.
/// Position flavour: -lambda1^2 Ibar - D^{-1/2} A D^{-1/2}.
struct ExtendedLaplacian {
  Coupling kind = Coupling::Momentum;
  double lambda1 = 0.0;  // position flavour only
  Eigen::MatrixXd matrix;
};

ExtendedLaplacian momentum_laplacian(const Network& net);
ExtendedLaplacian position_laplacian(const Network& net, double lambda1);

/// Dense 3N x 3N interaction operator D^{-1/2} A D^{-1/2} alone.
Eigen::MatrixXd interaction_matrix(const Network& net);

/// Sparse application of the interaction operator:
/// out_i = sum_{j~i} J_ij in_j / sqrt(d_i d_j).
void apply_interaction(const Network& net,
                       const std::vector<Eigen::Vector3d>& in,
                       std::vector<Eigen::Vector3d>& out);

/// Sparse application of the momentum Laplacian:
/// out_i = I_i^{-1} in_i - (interaction)_i.
void apply_momentum_laplacian(const Network& net,
                              const std::vector<Eigen::Vector3d>& in,
                              std::vector<Eigen::Vector3d>& out);

}  // namespace lpnet
