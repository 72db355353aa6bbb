#pragma once

#include <cstdint>

#include <Eigen/Dense>

#include "lpnet/integrate.hpp"

namespace lpnet {

/// Temperature with the Einstein-relation mapping to the noise amplitude:
/// beta = 1/T = 2 theta / sigma^2, so sigma = sqrt(2 theta T).
struct Temperature {
  double value = 1.0;

  double beta() const { return 1.0 / value; }
  double sigma(double theta) const { return std::sqrt(2.0 * theta * value); }
};

/// Time averages over the post-burn-in window of a trajectory. The order
/// parameter is the node-averaged momentum (rigid body) or position (heavy
/// top); `abs_*` are time averages of the per-sample |components|, which
/// survive the occasional sign flip of a pinned ordered direction.
struct Observables {
  Eigen::Vector3d mean_momentum = Eigen::Vector3d::Zero();
  Eigen::Vector3d mean_position = Eigen::Vector3d::Zero();
  Eigen::Vector3d abs_mean_momentum = Eigen::Vector3d::Zero();
  Eigen::Vector3d abs_mean_position = Eigen::Vector3d::Zero();
  double magnetisation = 0.0;
  double mean_energy = 0.0;
  double energy_variance = 0.0;
  std::int64_t samples = 0;
  std::int64_t burn_in_samples = 0;
};

/// Averages over the samples after dropping the first floor(burn_in * n).
/// Throws EmptyWindow when nothing remains.
Observables observables_from_trajectory(const Trajectory& traj, double burn_in);

/// Monte-Carlo thermodynamics of a single orbit |Pi| = r with Hamiltonian
/// h = Pi . I^{-1} Pi / 2: partition function, mean energy, fluctuation and
/// entropy (k_B = 1), with standard errors.
struct OrbitThermo {
  double partition = 0.0;
  double mean_energy = 0.0;
  double energy_variance = 0.0;
  double entropy = 0.0;
  double se_partition = 0.0;
  double se_mean_energy = 0.0;
  double se_energy_variance = 0.0;
  double se_entropy = 0.0;
};

OrbitThermo orbit_thermo_single(const Eigen::Matrix3d& inertia, double radius,
                                double beta, std::int64_t n_samples,
                                std::uint64_t seed);

/// Damped fixed-point solve of a mean-field self-consistency equation.
struct MeanFieldResult {
  Eigen::Vector3d order_parameter = Eigen::Vector3d::Zero();
  bool converged = false;
  int iterations = 0;
  double stderr_est = 0.0;  // MC error amplified by fixed-point conditioning
};

struct MeanFieldOptions {
  std::int64_t mc_samples = 20000;
  double damping = 0.5;
  double tol = 1e-3;
  int max_iter = 300;
  std::uint64_t seed = 0;
};

/// Rigid-body order parameter <Pi> on the orbit |Pi| = r. Starts from
/// symmetry-broken guesses along each axis and keeps the branch with the
/// largest magnitude.
MeanFieldResult meanfield_rb(const Eigen::Matrix3d& inertia,
                             const Eigen::Matrix3d& coupling, double radius,
                             double beta, const MeanFieldOptions& opt);

/// Heavy-top order parameter <Gamma> on the orbit C1 = c1, C2 = c2. The
/// non-compact momentum fiber is integrated by Gaussian importance sampling
/// in the tangent plane (flat fiber measure).
MeanFieldResult meanfield_ht(const Eigen::Matrix3d& inertia,
                             const Eigen::Matrix3d& coupling, double c1,
                             double c2, double beta,
                             const MeanFieldOptions& opt);

/// One evaluation of the rigid-body self-consistency map F at mean field x
/// (same sample set as meanfield_rb for the same options). `se` receives
/// the MC standard error of the estimate.
Eigen::Vector3d meanfield_rb_map(const Eigen::Matrix3d& inertia,
                                 const Eigen::Matrix3d& coupling, double radius,
                                 double beta, const Eigen::Vector3d& x,
                                 const MeanFieldOptions& opt,
                                 double* se = nullptr);

}  // namespace lpnet
