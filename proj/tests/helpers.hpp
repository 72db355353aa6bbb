#pragma once

// Shared test oracles, independent of the library implementation paths they
// check: componentwise cross products, spherical product quadrature,
// finite-difference derivatives, sampler statistics, random graphs.

#include <algorithm>
#include <cmath>
#include <functional>
#include <numbers>
#include <vector>

#include <Eigen/Dense>

#include "lpnet/network.hpp"
#include "lpnet/rng.hpp"
#include "lpnet/state.hpp"

namespace testing {

/// Componentwise cross product (oracle for ad/coad).
inline Eigen::Vector3d cross_oracle(const Eigen::Vector3d& a,
                                    const Eigen::Vector3d& b) {
  return {a.y() * b.z() - a.z() * b.y(), a.z() * b.x() - a.x() * b.z(),
          a.x() * b.y() - a.y() * b.x()};
}

/// Gauss-Legendre nodes/weights on [-1, 1] (Newton iteration).
inline void gauss_legendre(int n, std::vector<double>& nodes,
                           std::vector<double>& weights) {
  nodes.resize(n);
  weights.resize(n);
  for (int i = 0; i < (n + 1) / 2; ++i) {
    double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = x;
      for (int k = 2; k <= n; ++k) {
        const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      dp = n * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-15) break;
    }
    nodes[i] = -x;
    nodes[n - 1 - i] = x;
    weights[i] = weights[n - 1 - i] = 2.0 / ((1.0 - x * x) * dp * dp);
  }
}

/// Deterministic quadrature of f over the sphere |x| = r (area measure).
/// 100 x 200 product grid = 2e4 nodes.
inline double sphere_quadrature(double r,
                                const std::function<double(const Eigen::Vector3d&)>& f,
                                int n_z = 100, int n_phi = 200) {
  std::vector<double> z_nodes, z_weights;
  gauss_legendre(n_z, z_nodes, z_weights);
  double sum = 0.0;
  for (int i = 0; i < n_z; ++i) {
    const double z = z_nodes[i];
    const double s = std::sqrt(std::max(0.0, 1.0 - z * z));
    double phi_sum = 0.0;
    for (int j = 0; j < n_phi; ++j) {
      const double phi = 2.0 * std::numbers::pi * j / n_phi;
      const Eigen::Vector3d x(r * s * std::cos(phi), r * s * std::sin(phi),
                              r * z);
      phi_sum += f(x);
    }
    sum += z_weights[i] * phi_sum * (2.0 * std::numbers::pi / n_phi);
  }
  return r * r * sum;
}

/// Central finite difference of t -> value(state + t * field) at t = 0.
inline double directional_derivative(
    const std::function<double(const lpnet::LatticeState&)>& value,
    const lpnet::LatticeState& state, const lpnet::LatticeState& field,
    double eps = 1e-6) {
  auto shifted = [&](double t) {
    lpnet::LatticeState s = state;
    for (size_t i = 0; i < s.momentum.size(); ++i) {
      s.momentum[i] += t * field.momentum[i];
    }
    for (size_t i = 0; i < s.position.size(); ++i) {
      s.position[i] += t * field.position[i];
    }
    return value(s);
  };
  return (shifted(eps) - shifted(-eps)) / (2.0 * eps);
}

/// Two-sided KS statistic against uniform[a, b].
inline double ks_uniform(std::vector<double> samples, double a, double b) {
  std::sort(samples.begin(), samples.end());
  const double n = static_cast<double>(samples.size());
  double d = 0.0;
  for (size_t i = 0; i < samples.size(); ++i) {
    const double cdf = std::clamp((samples[i] - a) / (b - a), 0.0, 1.0);
    d = std::max(d, std::max((i + 1) / n - cdf, cdf - i / n));
  }
  return d;
}

/// Pearson chi-squared statistic for observed counts vs expected
/// probabilities (expected scaled to the observed total).
inline double chi_squared_statistic(const std::vector<double>& observed,
                                    const std::vector<double>& expected_prob) {
  double total = 0.0;
  for (const double o : observed) total += o;
  double chi2 = 0.0;
  for (size_t k = 0; k < observed.size(); ++k) {
    const double e = expected_prob[k] * total;
    if (e > 0.0) chi2 += (observed[k] - e) * (observed[k] - e) / e;
  }
  return chi2;
}

/// Random SPD 3x3 tensor with eigenvalues in [lo, hi].
inline Eigen::Matrix3d random_spd(const lpnet::RandomStream& rng,
                                  std::uint64_t key, double lo = 0.5,
                                  double hi = 3.0) {
  const Eigen::Vector3d axis = rng.sphere(key, 7);
  const double angle = 2.0 * std::numbers::pi * rng.uniform(key, 8);
  const Eigen::Matrix3d rot = Eigen::AngleAxisd(angle, axis).toRotationMatrix();
  Eigen::Vector3d eigs;
  for (int i = 0; i < 3; ++i) {
    eigs[i] = lo + (hi - lo) * rng.uniform(key, 9 + i);
  }
  const Eigen::Matrix3d m = rot * eigs.asDiagonal() * rot.transpose();
  return 0.5 * (m + m.transpose());
}

/// Random connected graph: spanning tree plus `extra` random edges.
inline lpnet::Network random_network(int nodes, int extra, std::uint64_t seed,
                                     bool random_tensors = true) {
  const lpnet::RandomStream rng(seed, lpnet::kMonteCarloDomain);
  std::vector<std::array<int, 2>> edges;
  auto has_edge = [&](int a, int b) {
    if (a > b) std::swap(a, b);
    for (const auto& e : edges) {
      if (e[0] == a && e[1] == b) return true;
    }
    return false;
  };
  for (int i = 1; i < nodes; ++i) {
    const int j = static_cast<int>(rng.uniform(100 + i) * i);
    edges.push_back({std::min(i, j), std::max(i, j)});
  }
  for (int k = 0; k < extra; ++k) {
    const int a = static_cast<int>(rng.uniform(500 + k, 0) * nodes) % nodes;
    const int b = static_cast<int>(rng.uniform(500 + k, 1) * nodes) % nodes;
    if (a != b && !has_edge(a, b)) {
      edges.push_back({std::min(a, b), std::max(a, b)});
    }
  }
  std::vector<Eigen::Matrix3d> inertia, coupling;
  for (int i = 0; i < nodes; ++i) {
    inertia.push_back(random_tensors ? random_spd(rng, 1000 + i)
                                     : Eigen::Matrix3d::Identity());
  }
  for (size_t e = 0; e < edges.size(); ++e) {
    coupling.push_back(random_tensors ? random_spd(rng, 2000 + e)
                                      : Eigen::Matrix3d::Identity());
  }
  return lpnet::Network::from_edges(nodes, edges, std::move(inertia),
                                    std::move(coupling));
}

/// Ferro/antiferro content of a record list, counted by eigenspace
/// membership: per eigen-group, the rank of the projection of the group's
/// span onto V = {mu_i = sqrt(d_i) mu} counts ferro directions; the rest of
/// the group is antiferro. Robust to arbitrary basis choices inside
/// degenerate eigenspaces.
template <typename Records>
inline std::pair<int, int> subspace_class_counts(const lpnet::Network& net,
                                                 const Records& records) {
  const int n = net.nodes();
  Eigen::MatrixXd basis = Eigen::MatrixXd::Zero(3 * n, 3);
  for (int i = 0; i < n; ++i) {
    basis.block<3, 3>(3 * i, 0) =
        std::sqrt(static_cast<double>(net.degree(i))) *
        Eigen::Matrix3d::Identity();
  }
  for (int c = 0; c < 3; ++c) basis.col(c).normalize();

  int ferro = 0, antiferro = 0;
  size_t k = 0;
  while (k < records.size()) {
    size_t end = k;
    while (end + 1 < records.size() &&
           records[end + 1].group == records[k].group) {
      ++end;
    }
    const int mult = static_cast<int>(end - k + 1);
    Eigen::MatrixXd span(3 * n, mult);
    for (int c = 0; c < mult; ++c) {
      const auto& spins = records[k + c].state.kind() == lpnet::ModelKind::HeavyTop
                              ? records[k + c].state.position
                              : records[k + c].state.momentum;
      for (int i = 0; i < n; ++i) span.col(c).segment<3>(3 * i) = spins[i];
      span.col(c).normalize();
    }
    const Eigen::MatrixXd overlap = basis.transpose() * span;  // 3 x mult
    const Eigen::JacobiSVD<Eigen::MatrixXd> svd(overlap);
    int rank = 0;
    for (int s = 0; s < svd.singularValues().size(); ++s) {
      if (svd.singularValues()[s] > 1e-6) ++rank;
    }
    ferro += rank;
    antiferro += mult - rank;
    k = end + 1;
  }
  return {ferro, antiferro};
}

/// The lambda2 values carried by ferro directions, found per eigen-group by
/// the rank of the group's projection onto V (an eigenvalue shared by ferro
/// and antiferro modes is reported once per ferro direction it hosts).
template <typename Records>
inline std::vector<double> ferro_eigenvalues(const lpnet::Network& net,
                                             const Records& records) {
  const int n = net.nodes();
  Eigen::MatrixXd basis = Eigen::MatrixXd::Zero(3 * n, 3);
  for (int i = 0; i < n; ++i) {
    basis.block<3, 3>(3 * i, 0) =
        std::sqrt(static_cast<double>(net.degree(i))) *
        Eigen::Matrix3d::Identity();
  }
  for (int c = 0; c < 3; ++c) basis.col(c).normalize();

  std::vector<double> out;
  size_t k = 0;
  while (k < records.size()) {
    size_t end = k;
    while (end + 1 < records.size() &&
           records[end + 1].group == records[k].group) {
      ++end;
    }
    const int mult = static_cast<int>(end - k + 1);
    Eigen::MatrixXd span(3 * n, mult);
    for (int c = 0; c < mult; ++c) {
      const auto& spins = records[k + c].state.kind() == lpnet::ModelKind::HeavyTop
                              ? records[k + c].state.position
                              : records[k + c].state.momentum;
      for (int i = 0; i < n; ++i) span.col(c).segment<3>(3 * i) = spins[i];
      span.col(c).normalize();
    }
    const Eigen::JacobiSVD<Eigen::MatrixXd> svd(basis.transpose() * span);
    for (int s = 0; s < svd.singularValues().size(); ++s) {
      if (svd.singularValues()[s] > 1e-6) {
        out.push_back(records[k].eigenvalue);
      }
    }
    k = end + 1;
  }
  return out;
}

/// Random rigid-body state with per-node radius r.
inline lpnet::LatticeState random_rb_state(const lpnet::Network& net, double r,
                                           std::uint64_t seed) {
  const lpnet::RandomStream rng(seed, lpnet::kInitDomain);
  lpnet::LatticeState s = lpnet::LatticeState::rigid_body(net.nodes());
  for (int i = 0; i < net.nodes(); ++i) s.momentum[i] = r * rng.sphere(3000 + i);
  return s;
}

/// Random heavy-top state with per-node Casimirs c1, c2.
inline lpnet::LatticeState random_ht_state(const lpnet::Network& net, double c1,
                                           double c2, std::uint64_t seed) {
  const lpnet::RandomStream rng(seed, lpnet::kInitDomain);
  lpnet::LatticeState s = lpnet::LatticeState::heavy_top(net.nodes());
  for (int i = 0; i < net.nodes(); ++i) {
    const Eigen::Vector3d u = rng.sphere(4000 + i, 0);
    const Eigen::Vector3d xi = rng.normal3(4000 + i, 1);
    const Eigen::Vector3d t1 = u.unitOrthogonal();
    const Eigen::Vector3d t2 = u.cross(t1);
    s.position[i] = std::sqrt(c2) * u;
    s.momentum[i] = (c1 / c2) * s.position[i] + xi[0] * t1 + xi[1] * t2;
  }
  return s;
}

}  // namespace testing
