#pragma once

#include <array>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "lpnet/error.hpp"

namespace lpnet {

/// Undirected connected graph with a symmetric positive-definite inertia
/// tensor per node and interaction tensor per edge. Immutable after
/// construction; sharable across threads.
class Network {
 public:
  /// General graph. `inertia` has one tensor per node, `coupling` one per
  /// edge (in the order of `edges`). Throws SelfLoop / DuplicateEdge /
  /// DisconnectedGraph / ConfigError on invalid input.
  static Network from_edges(int nodes,
                            const std::vector<std::array<int, 2>>& edges,
                            std::vector<Eigen::Matrix3d> inertia,
                            std::vector<Eigen::Matrix3d> coupling);

  /// Same, with one tensor shared by all nodes and one by all edges.
  static Network from_edges(int nodes,
                            const std::vector<std::array<int, 2>>& edges,
                            const Eigen::Matrix3d& inertia,
                            const Eigen::Matrix3d& coupling);

  /// width x height grid, 4-neighbour. Periodic wrapping needs both sides
  /// >= 3 (a periodic 2xN slab would create double edges).
  static Network lattice2d(int width, int height, bool periodic,
                           const Eigen::Matrix3d& inertia,
                           const Eigen::Matrix3d& coupling);

  /// Single node, no edges (free body).
  static Network single(const Eigen::Matrix3d& inertia);

  int nodes() const { return nodes_; }
  int edge_count() const { return static_cast<int>(edges_.size()); }
  const std::vector<std::array<int, 2>>& edges() const { return edges_; }
  int degree(int i) const { return degree_[i]; }
  const std::vector<int>& degrees() const { return degree_; }

  /// (neighbour, edge index) pairs of node i.
  const std::vector<std::pair<int, int>>& neighbors(int i) const {
    return adj_[i];
  }

  const Eigen::Matrix3d& inertia(int i) const { return inertia_[i]; }
  const Eigen::Matrix3d& inertia_inv(int i) const { return inertia_inv_[i]; }
  const Eigen::Matrix3d& coupling(int e) const { return coupling_[e]; }

  /// Degree normalisation 1/sqrt(d_i d_j) of edge e.
  double edge_weight(int e) const { return edge_weight_[e]; }

 private:
  Network() = default;
  void finalize();  // degrees, adjacency, weights, validation

  int nodes_ = 0;
  std::vector<std::array<int, 2>> edges_;
  std::vector<int> degree_;
  std::vector<std::vector<std::pair<int, int>>> adj_;
  std::vector<Eigen::Matrix3d> inertia_;
  std::vector<Eigen::Matrix3d> inertia_inv_;
  std::vector<Eigen::Matrix3d> coupling_;
  std::vector<double> edge_weight_;
};

}  // namespace lpnet
