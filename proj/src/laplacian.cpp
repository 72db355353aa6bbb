#include "lpnet/laplacian.hpp"

namespace lpnet {

Eigen::MatrixXd interaction_matrix(const Network& net) {
  const int n = net.nodes();
  Eigen::MatrixXd s = Eigen::MatrixXd::Zero(3 * n, 3 * n);
  for (int e = 0; e < net.edge_count(); ++e) {
    const auto [a, b] = net.edges()[e];
    const Eigen::Matrix3d block = net.edge_weight(e) * net.coupling(e);
    s.block<3, 3>(3 * a, 3 * b) = block;
    s.block<3, 3>(3 * b, 3 * a) = block.transpose();
  }
  return s;
}

ExtendedLaplacian momentum_laplacian(const Network& net) {
  ExtendedLaplacian lap;
  lap.kind = Coupling::Momentum;
  lap.matrix = -interaction_matrix(net);
  for (int i = 0; i < net.nodes(); ++i) {
    lap.matrix.block<3, 3>(3 * i, 3 * i) = net.inertia_inv(i);
  }
  return lap;
}

ExtendedLaplacian position_laplacian(const Network& net, double lambda1) {
  ExtendedLaplacian lap;
  lap.kind = Coupling::Position;
  lap.lambda1 = lambda1;
  lap.matrix = -interaction_matrix(net);
  for (int i = 0; i < net.nodes(); ++i) {
    lap.matrix.block<3, 3>(3 * i, 3 * i) = -lambda1 * lambda1 * net.inertia(i);
  }
  return lap;
}

void apply_interaction(const Network& net,
                       const std::vector<Eigen::Vector3d>& in,
                       std::vector<Eigen::Vector3d>& out) {
  const int n = net.nodes();
  out.assign(n, Eigen::Vector3d::Zero());
  for (int i = 0; i < n; ++i) {
    for (const auto& [j, e] : net.neighbors(i)) {
      out[i].noalias() += net.edge_weight(e) * (net.coupling(e) * in[j]);
    }
  }
}

void apply_momentum_laplacian(const Network& net,
                              const std::vector<Eigen::Vector3d>& in,
                              std::vector<Eigen::Vector3d>& out) {
  apply_interaction(net, in, out);
  for (int i = 0; i < net.nodes(); ++i) {
    out[i] = net.inertia_inv(i) * in[i] - out[i];
  }
}

}  // namespace lpnet
