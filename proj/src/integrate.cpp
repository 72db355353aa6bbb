#include "lpnet/integrate.hpp"

#include <cmath>

#include "lpnet/error.hpp"

namespace lpnet {

namespace {

// y += a * x, matching momentum/position layout.
void axpy(LatticeState& y, double a, const LatticeState& x) {
  for (size_t i = 0; i < y.momentum.size(); ++i) y.momentum[i] += a * x.momentum[i];
  for (size_t i = 0; i < y.position.size(); ++i) y.position[i] += a * x.position[i];
}

// drift = rhs + theta * dissipation
void drift_into(const Network& net, const LatticeState& s, double theta,
                LatticeState& out, LatticeState& scratch) {
  rhs_into(net, s, out);
  if (theta != 0.0) {
    dissipation_into(net, s, scratch);
    axpy(out, theta, scratch);
  }
}

// diffusion applied to given increments: sigma * (Pi_i x dW_i), and for the
// heavy top the same increments multiply Gamma_i.
void noise_into(const LatticeState& s, double sigma,
                const std::vector<Eigen::Vector3d>& dw, LatticeState& out) {
  const int n = s.size();
  out.momentum.resize(n);
  out.position.resize(s.position.size());
  for (int i = 0; i < n; ++i) out.momentum[i] = sigma * s.momentum[i].cross(dw[i]);
  for (size_t i = 0; i < s.position.size(); ++i) {
    out.position[i] = sigma * s.position[i].cross(dw[i]);
  }
}

}  // namespace

void IntegratorConfig::validate() const {
  if (!(dt > 0.0)) throw ConfigError("dt must be positive");
  if (steps < 1) throw ConfigError("steps must be >= 1");
  if (theta < 0.0) throw ConfigError("theta must be non-negative");
  if (sigma < 0.0) throw ConfigError("sigma must be non-negative");
  if (record_every < 1) throw ConfigError("record_every must be >= 1");
}

LatticeState step_deterministic(const Network& net, const LatticeState& s,
                                double dt, double theta) {
  LatticeState k1, k2, k3, k4, tmp, scratch;
  drift_into(net, s, theta, k1, scratch);
  tmp = s;
  axpy(tmp, 0.5 * dt, k1);
  drift_into(net, tmp, theta, k2, scratch);
  tmp = s;
  axpy(tmp, 0.5 * dt, k2);
  drift_into(net, tmp, theta, k3, scratch);
  tmp = s;
  axpy(tmp, dt, k3);
  drift_into(net, tmp, theta, k4, scratch);

  LatticeState out = s;
  axpy(out, dt / 6.0, k1);
  axpy(out, dt / 3.0, k2);
  axpy(out, dt / 3.0, k3);
  axpy(out, dt / 6.0, k4);
  return out;
}

LatticeState step_stochastic(const Network& net, const LatticeState& s,
                             double dt, double theta, double sigma,
                             const RandomStream& noise,
                             std::uint64_t step_index) {
  if (sigma == 0.0) return step_deterministic(net, s, dt, theta);

  const int n = s.size();
  const double sqrt_dt = std::sqrt(dt);
  std::vector<Eigen::Vector3d> dw(n);
  for (int i = 0; i < n; ++i) {
    dw[i] = sqrt_dt * noise.normal3(step_index, static_cast<std::uint32_t>(i));
  }

  LatticeState f0, f1, g0, g1, scratch;
  drift_into(net, s, theta, f0, scratch);
  noise_into(s, sigma, dw, g0);

  LatticeState predictor = s;
  axpy(predictor, dt, f0);
  axpy(predictor, 1.0, g0);

  drift_into(net, predictor, theta, f1, scratch);
  noise_into(predictor, sigma, dw, g1);

  LatticeState out = s;
  axpy(out, 0.5 * dt, f0);
  axpy(out, 0.5 * dt, f1);
  axpy(out, 0.5, g0);
  axpy(out, 0.5, g1);
  return out;
}

void project_to_casimirs(LatticeState& s, const CasimirLevels& target) {
  const int n = s.size();
  if (s.kind() == ModelKind::RigidBody) {
    for (int i = 0; i < n; ++i) {
      const double r = std::sqrt(2.0 * target.c1[i]);
      const double norm = s.momentum[i].norm();
      if (norm > 0.0) s.momentum[i] *= r / norm;
    }
  } else {
    for (int i = 0; i < n; ++i) {
      const double norm = s.position[i].norm();
      if (norm > 0.0) s.position[i] *= std::sqrt(target.c2[i]) / norm;
      const double g2 = s.position[i].squaredNorm();
      if (g2 > 0.0) {
        s.momentum[i] +=
            ((target.c1[i] - s.momentum[i].dot(s.position[i])) / g2) *
            s.position[i];
      }
    }
  }
}

Trajectory run(const Network& net, const LatticeState& s0,
               const IntegratorConfig& config) {
  config.validate();
  if (s0.size() != net.nodes()) {
    throw ConfigError("state length does not match network");
  }

  const RandomStream noise(config.seed, kNoiseDomain);
  const CasimirLevels initial_levels = casimir_levels(s0);

  Trajectory traj;
  const std::int64_t n_samples = config.steps / config.record_every + 1;
  traj.times.reserve(n_samples);
  traj.states.reserve(n_samples);
  traj.energies.reserve(n_samples);
  traj.casimirs.reserve(n_samples);

  auto record = [&](double t, const LatticeState& s) {
    traj.times.push_back(t);
    traj.states.push_back(s);
    traj.energies.push_back(hamiltonian(net, s));
    traj.casimirs.push_back(casimir_levels(s));
  };

  LatticeState s = s0;
  record(0.0, s);
  for (std::int64_t k = 1; k <= config.steps; ++k) {
    s = step_stochastic(net, s, config.dt, config.theta, config.sigma, noise,
                        static_cast<std::uint64_t>(k));
    if (!s.finite()) throw NonFiniteState(k);
    if (config.projection) project_to_casimirs(s, initial_levels);
    if (k % config.record_every == 0) record(k * config.dt, s);
  }
  return traj;
}

}  // namespace lpnet
