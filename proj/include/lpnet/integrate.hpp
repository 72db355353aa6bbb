#pragma once

#include <cstdint>
#include <vector>

#include "lpnet/model.hpp"
#include "lpnet/rng.hpp"
#include "lpnet/state.hpp"

namespace lpnet {

struct IntegratorConfig {
  double dt = 1e-3;
  std::int64_t steps = 1;
  double theta = 0.0;        // dissipation amplitude
  double sigma = 0.0;        // noise amplitude
  std::uint64_t seed = 0;
  std::int64_t record_every = 1;
  bool projection = false;   // renormalise to the initial Casimir levels

  void validate() const;
};

/// Recorded samples: times, states and derived observables. Sample count is
/// floor(steps / record_every) + 1 (the initial state is always recorded).
struct Trajectory {
  std::vector<double> times;
  std::vector<LatticeState> states;
  std::vector<double> energies;
  std::vector<CasimirLevels> casimirs;

  int samples() const { return static_cast<int>(times.size()); }
};

/// One classical RK4 step of rhs + theta * dissipation.
LatticeState step_deterministic(const Network& net, const LatticeState& s,
                                double dt, double theta);

/// One Stratonovich-Heun step. Noise per node is sigma * Pi x dW (and the
/// same increments act on Gamma in the heavy-top variant). `step_index`
/// keys the Wiener increments; sigma == 0 delegates to the deterministic
/// stepper so the two paths agree bitwise.
LatticeState step_stochastic(const Network& net, const LatticeState& s,
                             double dt, double theta, double sigma,
                             const RandomStream& noise,
                             std::uint64_t step_index);

/// Deterministic function of (net, s0, config), including the seed. Throws
/// NonFiniteState with the failing step index.
Trajectory run(const Network& net, const LatticeState& s0,
               const IntegratorConfig& config);

/// Rescale each node back to the Casimir levels in `target` (exact per-node
/// orbit projection).
void project_to_casimirs(LatticeState& s, const CasimirLevels& target);

}  // namespace lpnet
