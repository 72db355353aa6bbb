#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "lpnet/statmech.hpp"

namespace lpnet {

struct InitialCondition {
  enum class Policy { RandomOnOrbit, NearFerro, FromFile };
  Policy policy = Policy::RandomOnOrbit;
  int axis = 2;                 // NearFerro axis (0, 1, 2)
  double perturbation = 0.05;   // rotation angle applied at perturbed nodes
  int perturbed_nodes = 2;
  std::string path;             // FromFile checkpoint
};

/// Draw an initial state on the prescribed per-node orbits. Rigid body:
/// |Pi_i| = radius. Heavy top: |Gamma_i|^2 = c2, Pi_i . Gamma_i = c1, with a
/// thermal tangential momentum component at temperature T.
LatticeState draw_initial_state(const Network& net, ModelKind model,
                                const InitialCondition& init, double radius,
                                double c1, double c2, double temperature,
                                std::uint64_t seed);

struct SweepConfig {
  ModelKind model = ModelKind::RigidBody;
  std::vector<double> temperatures;  // strictly positive, sorted ascending
  double theta = 1.0;
  double dt = 1e-3;
  std::int64_t steps = 100000;
  std::int64_t record_every = 100;
  double burn_in = 0.5;
  int replicas = 1;
  std::uint64_t base_seed = 0;
  InitialCondition init;
  LatticeState file_state;  // preloaded state for Policy::FromFile
  double radius = 1.0;  // rigid-body orbit radius per node
  double c1 = 1.0;      // heavy-top Casimir targets per node
  double c2 = 1.0;
  bool annealed = false;    // warm-start each temperature from the previous
  bool projection = true;
  int threads = 0;          // 0 = hardware concurrency
  double drift_flag_threshold = 1e-2;

  void validate() const;
};

struct SweepCell {
  double temperature = 0.0;
  int replica = 0;
  std::uint64_t seed = 0;
  bool ok = false;
  std::string error;
  Observables observables;
  double casimir_drift = 0.0;  // max relative per-node drift over the run
  bool drift_flagged = false;
  double wall_seconds = 0.0;
};

struct SweepAggregate {
  double temperature = 0.0;
  int cells = 0;
  Eigen::Vector3d mean = Eigen::Vector3d::Zero();
  Eigen::Vector3d stddev = Eigen::Vector3d::Zero();
  Eigen::Vector3d median = Eigen::Vector3d::Zero();
  Eigen::Vector3d abs_mean = Eigen::Vector3d::Zero();
  double magnitude_mean = 0.0;
  double magnitude_std = 0.0;
  double magnitude_median = 0.0;
};

struct SweepResult {
  std::vector<SweepCell> cells;           // one row per (T, replica)
  std::vector<SweepAggregate> aggregates;  // one per temperature
};

/// Runs every (temperature, replica) cell; cells are independent unless
/// `annealed`, rows are deterministic functions of the base seed, and a
/// failed cell is recorded rather than aborting the sweep.
SweepResult run_sweep(const Network& net, const SweepConfig& config);

/// Order-parameter component fed to the transition detector.
enum class SweepComponent { X, Y, Z, Magnitude, AbsX, AbsY, AbsZ };

struct TransitionEstimate {
  double temperature = 0.0;
  double uncertainty = 0.0;  // local grid spacing
  double strength = 0.0;     // |d<m>/dT| at the estimate
  bool weak = false;         // curvature test failed (plateau / linear data)
};

/// Maxima of |d<m>/dT| by central differences on the grid. Needs >= 5
/// points, otherwise throws TooFewPoints.
std::vector<TransitionEstimate> detect_transitions(
    const std::vector<double>& temperatures, const std::vector<double>& series);

std::vector<TransitionEstimate> detect_transitions(const SweepResult& result,
                                                   SweepComponent component);

}  // namespace lpnet
