#include "lpnet/equilibria.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <thread>

#include <lapacke.h>

#include "lpnet/error.hpp"
#include "lpnet/so3.hpp"

namespace lpnet {

namespace {

constexpr double kGroupGap = 1e-8;      // relative eigenvalue grouping gap
constexpr double kClassTol = 1e-8;      // ferro/antiferro tolerance
constexpr double kAbscissaZero = 1e-8;  // |Re| below this reports as zero

// Stacked eigenvector column -> per-node vectors.
std::vector<Eigen::Vector3d> unstack(const Eigen::VectorXd& v) {
  std::vector<Eigen::Vector3d> out(v.size() / 3);
  for (size_t i = 0; i < out.size(); ++i) out[i] = v.segment<3>(3 * i);
  return out;
}

void assign_groups(std::vector<EquilibriumRecord>& records) {
  if (records.empty()) return;
  double scale = 1.0;
  for (const auto& r : records) scale = std::max(scale, std::abs(r.eigenvalue));
  const double gap = kGroupGap * scale;

  int group = 0;
  size_t start = 0;
  for (size_t k = 1; k <= records.size(); ++k) {
    const bool boundary =
        k == records.size() ||
        records[k].eigenvalue - records[k - 1].eigenvalue > gap;
    if (!boundary) continue;
    bool mixed = false;
    for (size_t j = start + 1; j < k; ++j) {
      if (records[j].spin_class != records[start].spin_class) mixed = true;
    }
    for (size_t j = start; j < k; ++j) {
      records[j].group = group;
      records[j].multiplicity = static_cast<int>(k - start);
      records[j].group_mixed = mixed;
    }
    ++group;
    start = k;
  }
}

Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> symmetric_eigensolve(
    const Eigen::MatrixXd& m) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(m);
  if (es.info() != Eigen::Success) {
    throw EigensolverError("symmetric eigensolver failed to converge");
  }
  return es;
}

DefinitenessVerdict classify_spectrum(const Eigen::VectorXd& eigs) {
  const double scale = std::max(1.0, eigs.cwiseAbs().maxCoeff());
  const double tol = 1e-10 * scale;
  int pos = 0, neg = 0, zero = 0;
  for (int i = 0; i < eigs.size(); ++i) {
    if (eigs[i] > tol) ++pos;
    else if (eigs[i] < -tol) ++neg;
    else ++zero;
  }
  DefinitenessVerdict v;
  v.zero_count = zero;
  if (neg == 0 && zero == 0) v.kind = Definiteness::PositiveDefinite;
  else if (neg == 0) v.kind = Definiteness::PositiveSemidefinite;
  else if (pos == 0 && zero == 0) v.kind = Definiteness::NegativeDefinite;
  else if (pos == 0) v.kind = Definiteness::NegativeSemidefinite;
  else v.kind = Definiteness::Indefinite;
  return v;
}

}  // namespace

std::string to_string(SpinClass c) {
  switch (c) {
    case SpinClass::Ferromagnetic: return "ferromagnetic";
    case SpinClass::AntiFerromagnetic: return "antiferromagnetic";
    default: return "mixed";
  }
}

std::string to_string(Definiteness d) {
  switch (d) {
    case Definiteness::PositiveDefinite: return "positive_definite";
    case Definiteness::PositiveSemidefinite: return "positive_semidefinite";
    case Definiteness::NegativeDefinite: return "negative_definite";
    case Definiteness::NegativeSemidefinite: return "negative_semidefinite";
    default: return "indefinite";
  }
}

SpinClass classify(const Network& net, const LatticeState& state) {
  const auto& spins = state.kind() == ModelKind::HeavyTop ? state.position
                                                          : state.momentum;
  double norm2 = 0.0;
  for (const auto& v : spins) norm2 += v.squaredNorm();
  const double norm = std::sqrt(norm2);
  if (norm == 0.0) throw ZeroState("cannot classify the zero state");

  // Ferro: mu_i / sqrt(d_i) constant across nodes.
  Eigen::Vector3d ref = Eigen::Vector3d::Zero();
  double weight = 0.0;
  std::vector<Eigen::Vector3d> scaled(spins.size());
  double scale_max = 0.0;
  for (size_t i = 0; i < spins.size(); ++i) {
    scaled[i] = spins[i] / std::sqrt(static_cast<double>(net.degree(i)));
    ref += scaled[i];
    weight += 1.0;
    scale_max = std::max(scale_max, scaled[i].norm());
  }
  ref /= weight;
  double dev = 0.0;
  for (const auto& v : scaled) dev = std::max(dev, (v - ref).norm());
  if (dev <= kClassTol * std::max(scale_max, 1e-300)) {
    return SpinClass::Ferromagnetic;
  }

  Eigen::Vector3d weighted = Eigen::Vector3d::Zero();
  for (size_t i = 0; i < spins.size(); ++i) {
    weighted += std::sqrt(static_cast<double>(net.degree(i))) * spins[i];
  }
  if (weighted.norm() < kClassTol * norm) return SpinClass::AntiFerromagnetic;
  return SpinClass::Mixed;
}

std::vector<EquilibriumRecord> momentum_equilibria(const Network& net,
                                                   double casimir_a) {
  if (!(casimir_a > 0.0)) throw ConfigError("casimir level must be positive");
  const auto lap = momentum_laplacian(net);
  const auto es = symmetric_eigensolve(lap.matrix);

  std::vector<EquilibriumRecord> records(3 * net.nodes());
  const double scale = std::sqrt(2.0 * casimir_a);
  for (size_t k = 0; k < records.size(); ++k) {
    auto& r = records[k];
    r.eigenvalue = es.eigenvalues()[k];
    r.state.momentum = unstack(scale * es.eigenvectors().col(k));
    r.spin_class = classify(net, r.state);
    r.casimirs = casimir_levels(r.state);
  }
  assign_groups(records);
  return records;
}

std::vector<EquilibriumRecord> position_equilibria(const Network& net,
                                                   double lambda1, double c2) {
  if (!(c2 > 0.0)) throw ConfigError("c2 must be positive");
  const auto lap = position_laplacian(net, lambda1);
  const auto es = symmetric_eigensolve(lap.matrix);

  const int n = net.nodes();
  std::vector<EquilibriumRecord> records(3 * n);
  const double scale = std::sqrt(c2);
  for (size_t k = 0; k < records.size(); ++k) {
    auto& r = records[k];
    // L(lambda1) Gamma = -lambda2 Gamma: ascending eigenvalue order means
    // descending lambda2, so flip to keep records sorted by lambda2.
    const size_t col = records.size() - 1 - k;
    r.eigenvalue = -es.eigenvalues()[col];
    r.lambda1 = lambda1;
    r.state.position = unstack(scale * es.eigenvectors().col(col));
    r.state.momentum.resize(n);
    for (int i = 0; i < n; ++i) {
      r.state.momentum[i] = -lambda1 * (net.inertia(i) * r.state.position[i]);
    }
    r.spin_class = classify(net, r.state);
    r.casimirs = casimir_levels(r.state);
  }
  assign_groups(records);
  return records;
}

Eigen::MatrixXd linearize_momentum(const Network& net,
                                   const EquilibriumRecord& record) {
  const int n = net.nodes();
  Eigen::MatrixXd shifted = momentum_laplacian(net).matrix;
  shifted.diagonal().array() -= record.eigenvalue;
  Eigen::MatrixXd out(3 * n, 3 * n);
  for (int i = 0; i < n; ++i) {
    out.middleRows<3>(3 * i) =
        so3::hat(record.state.momentum[i]) * shifted.middleRows<3>(3 * i);
  }
  return out;
}

Eigen::MatrixXd linearize_position(const Network& net,
                                   const EquilibriumRecord& record) {
  const int n = net.nodes();
  const double l1 = record.lambda1;
  const double l2 = record.eigenvalue;
  const Eigen::MatrixXd s = interaction_matrix(net);

  Eigen::MatrixXd out = Eigen::MatrixXd::Zero(6 * n, 6 * n);
  for (int i = 0; i < n; ++i) {
    const Eigen::Vector3d& gamma = record.state.position[i];
    const Eigen::Matrix3d hat_gamma = so3::hat(gamma);
    // d(dPi)/dt
    out.block<3, 3>(3 * i, 3 * i) =
        l1 * hat_gamma - so3::hat(net.inertia(i) * gamma) * net.inertia_inv(i) * l1;
    out.block(3 * i, 3 * n, 3, 3 * n) = -hat_gamma * s.middleRows<3>(3 * i);
    out.block<3, 3>(3 * i, 3 * n + 3 * i) +=
        so3::hat(l2 * gamma - l1 * l1 * (net.inertia(i) * gamma));
    // d(dGamma)/dt
    out.block<3, 3>(3 * n + 3 * i, 3 * i) = hat_gamma * net.inertia_inv(i);
    out.block<3, 3>(3 * n + 3 * i, 3 * n + 3 * i) = l1 * hat_gamma;
  }
  return out;
}

double spectral_abscissa(const Eigen::MatrixXd& m) {
  const lapack_int n = static_cast<lapack_int>(m.rows());
  if (n == 0) return 0.0;
  Eigen::MatrixXd a = m;  // dgeev overwrites
  std::vector<double> wr(n), wi(n);
  const lapack_int info =
      LAPACKE_dgeev(LAPACK_COL_MAJOR, 'N', 'N', n, a.data(), n, wr.data(),
                    wi.data(), nullptr, 1, nullptr, 1);
  if (info != 0) {
    throw EigensolverError("dgeev failed with info " + std::to_string(info));
  }
  double abscissa = -std::numeric_limits<double>::infinity();
  for (lapack_int i = 0; i < n; ++i) abscissa = std::max(abscissa, wr[i]);
  return std::abs(abscissa) < kAbscissaZero ? 0.0 : abscissa;
}

double momentum_abscissa(const Network& net, const EquilibriumRecord& record) {
  // hat(Pi_e)(L - lambda 1) = V A V^T (L - lambda 1) with V the per-node
  // orthonormal complements of Pi_i and A block-diagonal skew; the nonzero
  // spectrum equals that of A (V^T (L - lambda) V), which is 2m x 2m.
  const int n = net.nodes();
  std::vector<int> active;
  std::vector<Eigen::Matrix<double, 3, 2>> frames(n);
  std::vector<int> offset(n, -1);
  std::vector<double> norms(n, 0.0);
  double scale = 0.0;
  for (int i = 0; i < n; ++i) scale = std::max(scale, record.state.momentum[i].norm());
  for (int i = 0; i < n; ++i) {
    const Eigen::Vector3d& pi = record.state.momentum[i];
    const double norm = pi.norm();
    if (norm <= 1e-14 * std::max(scale, 1.0)) continue;
    const Eigen::Vector3d axis = pi / norm;
    Eigen::Vector3d u = axis.unitOrthogonal();
    Eigen::Vector3d v = axis.cross(u);
    frames[i].col(0) = u;
    frames[i].col(1) = v;
    norms[i] = norm;
    offset[i] = static_cast<int>(2 * active.size());
    active.push_back(i);
  }
  const int m = static_cast<int>(active.size());
  if (m == 0) return 0.0;

  // B = V^T (L - lambda) V assembled block-sparse from the graph.
  Eigen::MatrixXd b = Eigen::MatrixXd::Zero(2 * m, 2 * m);
  for (int ia = 0; ia < m; ++ia) {
    const int i = active[ia];
    Eigen::Matrix3d diag = net.inertia_inv(i);
    diag.diagonal().array() -= record.eigenvalue;
    b.block<2, 2>(2 * ia, 2 * ia) =
        frames[i].transpose() * diag * frames[i];
    for (const auto& [j, e] : net.neighbors(i)) {
      if (offset[j] < 0) continue;
      b.block<2, 2>(2 * ia, offset[j]) =
          frames[i].transpose() *
          (-net.edge_weight(e) * net.coupling(e)) * frames[j];
    }
  }
  // M' = A B with A_i = |Pi_i| [[0,-1],[1,0]].
  Eigen::MatrixXd mprime(2 * m, 2 * m);
  for (int ia = 0; ia < m; ++ia) {
    const double norm = norms[active[ia]];
    mprime.row(2 * ia) = -norm * b.row(2 * ia + 1);
    mprime.row(2 * ia + 1) = norm * b.row(2 * ia);
  }
  return spectral_abscissa(mprime);
}

void stability_pass(const Network& net, std::vector<EquilibriumRecord>& records,
                    int threads) {
  if (records.empty()) return;
  if (threads <= 0) {
    threads = std::max(1u, std::thread::hardware_concurrency());
  }

  // One representative per eigen-group.
  std::vector<size_t> reps;
  for (size_t k = 0; k < records.size(); ++k) {
    if (reps.empty() || records[reps.back()].group != records[k].group) {
      reps.push_back(k);
    }
  }

  const bool momentum = records[0].state.kind() == ModelKind::RigidBody;
  std::vector<double> values(reps.size());
  std::atomic<size_t> next{0};
  auto worker = [&]() {
    for (size_t j = next.fetch_add(1); j < reps.size(); j = next.fetch_add(1)) {
      const auto& rec = records[reps[j]];
      values[j] = momentum ? momentum_abscissa(net, rec)
                           : spectral_abscissa(linearize_position(net, rec));
    }
  };
  std::vector<std::thread> pool;
  const int n_workers = std::min<int>(threads, static_cast<int>(reps.size()));
  for (int t = 1; t < n_workers; ++t) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();

  for (size_t j = 0; j < reps.size(); ++j) {
    const int group = records[reps[j]].group;
    for (auto& r : records) {
      if (r.group == group) r.spectral_abscissa = values[j];
    }
  }
}

DefinitenessVerdict energy_casimir_test_momentum(const Network& net,
                                                 const EquilibriumRecord& record,
                                                 double phi_second) {
  Eigen::MatrixXd h = momentum_laplacian(net).matrix;
  h.diagonal().array() -= record.eigenvalue;
  Eigen::VectorXd mu(3 * net.nodes());
  for (int i = 0; i < net.nodes(); ++i) {
    mu.segment<3>(3 * i) = record.state.momentum[i];
  }
  h += phi_second * mu * mu.transpose();
  return classify_spectrum(symmetric_eigensolve(h).eigenvalues());
}

DefinitenessVerdict energy_casimir_test_position(const Network& net,
                                                 const EquilibriumRecord& record,
                                                 double lambda2_hat) {
  // X = Ibar^{-1} is positive definite by the network invariant; classify
  // the Schur complement B = L(lambda1) + lambda2 + lambda2_hat Gamma Gamma^T.
  Eigen::MatrixXd b = position_laplacian(net, record.lambda1).matrix;
  b.diagonal().array() += record.eigenvalue;
  Eigen::VectorXd gamma(3 * net.nodes());
  for (int i = 0; i < net.nodes(); ++i) {
    gamma.segment<3>(3 * i) = record.state.position[i];
  }
  b += lambda2_hat * gamma * gamma.transpose();
  return classify_spectrum(symmetric_eigensolve(b).eigenvalues());
}

}  // namespace lpnet
