#include "lpnet/network.hpp"

#include <algorithm>
#include <set>
#include <string>
#include <vector>

namespace lpnet {

namespace {

void check_spd(const Eigen::Matrix3d& m, const char* what) {
  if ((m - m.transpose()).cwiseAbs().maxCoeff() > 1e-14) {
    throw ConfigError(std::string(what) + " tensor is not symmetric");
  }
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> es(m);
  if (es.eigenvalues().minCoeff() <= 0.0) {
    throw ConfigError(std::string(what) + " tensor is not positive definite");
  }
}

}  // namespace

Network Network::from_edges(int nodes,
                            const std::vector<std::array<int, 2>>& edges,
                            std::vector<Eigen::Matrix3d> inertia,
                            std::vector<Eigen::Matrix3d> coupling) {
  if (nodes < 1) throw ConfigError("network needs at least one node");
  if (static_cast<int>(inertia.size()) != nodes) {
    throw ConfigError("expected one inertia tensor per node");
  }
  if (coupling.size() != edges.size()) {
    throw ConfigError("expected one coupling tensor per edge");
  }
  Network net;
  net.nodes_ = nodes;
  net.inertia_ = std::move(inertia);
  net.coupling_ = std::move(coupling);

  std::set<std::pair<int, int>> seen;
  net.edges_.reserve(edges.size());
  for (const auto& e : edges) {
    int a = e[0], b = e[1];
    if (a < 0 || b < 0 || a >= nodes || b >= nodes) {
      throw ConfigError("edge endpoint out of range");
    }
    if (a == b) throw SelfLoop("self loop at node " + std::to_string(a));
    if (a > b) std::swap(a, b);
    if (!seen.insert({a, b}).second) {
      throw DuplicateEdge("duplicate edge " + std::to_string(a) + "-" +
                          std::to_string(b));
    }
    net.edges_.push_back({a, b});
  }
  net.finalize();
  return net;
}

Network Network::from_edges(int nodes,
                            const std::vector<std::array<int, 2>>& edges,
                            const Eigen::Matrix3d& inertia,
                            const Eigen::Matrix3d& coupling) {
  return from_edges(nodes, edges,
                    std::vector<Eigen::Matrix3d>(nodes, inertia),
                    std::vector<Eigen::Matrix3d>(edges.size(), coupling));
}

Network Network::lattice2d(int width, int height, bool periodic,
                           const Eigen::Matrix3d& inertia,
                           const Eigen::Matrix3d& coupling) {
  if (width < 1 || height < 1) throw ConfigError("lattice sides must be >= 1");
  if (periodic && (width < 3 || height < 3)) {
    throw ConfigError("periodic lattice needs both sides >= 3");
  }
  const int n = width * height;
  auto id = [width](int x, int y) { return y * width + x; };
  std::vector<std::array<int, 2>> edges;
  for (int y = 0; y < height; ++y) {
    for (int x = 0; x < width; ++x) {
      if (x + 1 < width) edges.push_back({id(x, y), id(x + 1, y)});
      else if (periodic) edges.push_back({id(x, y), id(0, y)});
      if (y + 1 < height) edges.push_back({id(x, y), id(x, y + 1)});
      else if (periodic) edges.push_back({id(x, y), id(x, 0)});
    }
  }
  return from_edges(n, edges, inertia, coupling);
}

Network Network::single(const Eigen::Matrix3d& inertia) {
  return from_edges(1, {}, std::vector<Eigen::Matrix3d>{inertia},
                    std::vector<Eigen::Matrix3d>{});
}

void Network::finalize() {
  for (const auto& m : inertia_) check_spd(m, "inertia");
  for (const auto& m : coupling_) check_spd(m, "coupling");

  inertia_inv_.resize(inertia_.size());
  for (size_t i = 0; i < inertia_.size(); ++i) {
    inertia_inv_[i] = inertia_[i].inverse();
  }

  degree_.assign(nodes_, 0);
  adj_.assign(nodes_, {});
  for (size_t e = 0; e < edges_.size(); ++e) {
    const auto [a, b] = edges_[e];
    ++degree_[a];
    ++degree_[b];
    adj_[a].push_back({b, static_cast<int>(e)});
    adj_[b].push_back({a, static_cast<int>(e)});
  }

  // Connectivity (BFS). A single node with no edges is a valid degenerate
  // network (free body); otherwise every node needs a neighbour.
  if (nodes_ > 1) {
    std::vector<char> visited(nodes_, 0);
    std::vector<int> queue = {0};
    visited[0] = 1;
    for (size_t q = 0; q < queue.size(); ++q) {
      for (const auto& [j, e] : adj_[queue[q]]) {
        if (!visited[j]) {
          visited[j] = 1;
          queue.push_back(j);
        }
      }
    }
    if (std::find(visited.begin(), visited.end(), 0) != visited.end()) {
      throw DisconnectedGraph("graph is not connected");
    }
  }

  edge_weight_.resize(edges_.size());
  for (size_t e = 0; e < edges_.size(); ++e) {
    const auto [a, b] = edges_[e];
    edge_weight_[e] =
        1.0 / std::sqrt(static_cast<double>(degree_[a]) * degree_[b]);
  }
}

}  // namespace lpnet
