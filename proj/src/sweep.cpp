#include "lpnet/sweep.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <thread>

#include "lpnet/error.hpp"
#include "lpnet/rng.hpp"

namespace lpnet {

namespace {

Eigen::Vector3d axis_vector(int axis) {
  if (axis < 0 || axis > 2) throw ConfigError("axis must be 0, 1 or 2");
  return Eigen::Vector3d::Unit(axis);
}

}  // namespace

LatticeState draw_initial_state(const Network& net, ModelKind model,
                                const InitialCondition& init, double radius,
                                double c1, double c2, double temperature,
                                std::uint64_t seed) {
  const int n = net.nodes();
  const RandomStream rng(seed, kInitDomain);
  LatticeState s = model == ModelKind::RigidBody ? LatticeState::rigid_body(n)
                                                 : LatticeState::heavy_top(n);

  switch (init.policy) {
    case InitialCondition::Policy::FromFile:
      throw ConfigError("FromFile initial state must be loaded by the caller");
    case InitialCondition::Policy::RandomOnOrbit: {
      if (model == ModelKind::RigidBody) {
        for (int i = 0; i < n; ++i) {
          s.momentum[i] = radius * rng.sphere(i, 0);
        }
      } else {
        // Thermal tangential momentum: kinetic fluctuations scale like
        // sqrt(T * max-eig(I)); burn-in equilibrates the rest.
        double imax = 0.0;
        for (int i = 0; i < n; ++i) {
          Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> es(net.inertia(i));
          imax = std::max(imax, es.eigenvalues().maxCoeff());
        }
        const double v_scale = std::sqrt(std::max(temperature, 0.0) * imax);
        for (int i = 0; i < n; ++i) {
          const Eigen::Vector3d u = rng.sphere(i, 0);
          const Eigen::Vector3d xi = rng.normal3(i, 1);
          const Eigen::Vector3d t1 = u.unitOrthogonal();
          const Eigen::Vector3d t2 = u.cross(t1);
          s.position[i] = std::sqrt(c2) * u;
          s.momentum[i] = (c1 / c2) * s.position[i] +
                          v_scale * (xi[0] * t1 + xi[1] * t2);
        }
      }
      break;
    }
    case InitialCondition::Policy::NearFerro: {
      const Eigen::Vector3d e = axis_vector(init.axis);
      if (model == ModelKind::RigidBody) {
        for (int i = 0; i < n; ++i) s.momentum[i] = radius * e;
      } else {
        for (int i = 0; i < n; ++i) {
          s.position[i] = std::sqrt(c2) * e;
          s.momentum[i] = (c1 / c2) * s.position[i];
        }
      }
      // Joint small rotation at a few nodes: preserves every per-node
      // Casimir exactly while breaking the equilibrium.
      const int count = std::min(init.perturbed_nodes, n);
      for (int k = 0; k < count; ++k) {
        const int node = static_cast<int>(rng.uniform(1000 + k) * n) % n;
        const Eigen::Vector3d axis = rng.sphere(2000 + k);
        const Eigen::AngleAxisd rot(init.perturbation, axis);
        s.momentum[node] = rot * s.momentum[node];
        if (model == ModelKind::HeavyTop) {
          s.position[node] = rot * s.position[node];
        }
      }
      break;
    }
  }
  return s;
}

void SweepConfig::validate() const {
  if (temperatures.empty()) throw ConfigError("temperature grid is empty");
  for (size_t k = 0; k < temperatures.size(); ++k) {
    if (!(temperatures[k] > 0.0)) {
      throw ConfigError("temperatures must be positive");
    }
    if (k > 0 && temperatures[k] <= temperatures[k - 1]) {
      throw ConfigError("temperature grid must be strictly increasing");
    }
  }
  if (replicas < 1) throw ConfigError("replicas must be >= 1");
  if (theta < 0.0) throw ConfigError("theta must be non-negative");
  if (burn_in < 0.0 || burn_in >= 1.0) {
    throw ConfigError("burn_in fraction must be in [0, 1)");
  }
}

namespace {

SweepCell run_cell(const Network& net, const SweepConfig& config, double T,
                   int t_index, int replica, const LatticeState* warm_start,
                   LatticeState* final_state) {
  SweepCell cell;
  cell.temperature = T;
  cell.replica = replica;
  cell.seed = mix_seed(config.base_seed, t_index, replica);
  const auto t0 = std::chrono::steady_clock::now();
  try {
    LatticeState s0;
    if (warm_start != nullptr) {
      s0 = *warm_start;
    } else if (config.init.policy == InitialCondition::Policy::FromFile) {
      if (config.file_state.size() != net.nodes()) {
        throw ConfigError("file state does not match the network");
      }
      s0 = config.file_state;
    } else {
      s0 = draw_initial_state(net, config.model, config.init, config.radius,
                              config.c1, config.c2, T, cell.seed);
    }

    IntegratorConfig icfg;
    icfg.dt = config.dt;
    icfg.steps = config.steps;
    icfg.theta = config.theta;
    icfg.sigma = Temperature{T}.sigma(config.theta);
    icfg.seed = cell.seed;
    icfg.record_every = config.record_every;
    icfg.projection = config.projection;

    const Trajectory traj = run(net, s0, icfg);
    cell.observables = observables_from_trajectory(traj, config.burn_in);

    const auto& first = traj.casimirs.front();
    const auto& last = traj.casimirs.back();
    double drift = 0.0;
    for (size_t i = 0; i < first.c1.size(); ++i) {
      const double scale = std::max(std::abs(first.c1[i]), 1e-12);
      drift = std::max(drift, std::abs(last.c1[i] - first.c1[i]) / scale);
    }
    for (size_t i = 0; i < first.c2.size(); ++i) {
      const double scale = std::max(std::abs(first.c2[i]), 1e-12);
      drift = std::max(drift, std::abs(last.c2[i] - first.c2[i]) / scale);
    }
    cell.casimir_drift = drift;
    cell.drift_flagged = drift > config.drift_flag_threshold;
    if (final_state != nullptr) *final_state = traj.states.back();
    cell.ok = true;
  } catch (const Error& err) {
    cell.ok = false;
    cell.error = err.what();
  }
  cell.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
          .count();
  return cell;
}

double component_median(std::vector<double> values) {
  std::sort(values.begin(), values.end());
  const size_t n = values.size();
  return n % 2 == 1 ? values[n / 2]
                    : 0.5 * (values[n / 2 - 1] + values[n / 2]);
}

}  // namespace

SweepResult run_sweep(const Network& net, const SweepConfig& config) {
  config.validate();
  const int nt = static_cast<int>(config.temperatures.size());
  const int total = nt * config.replicas;

  SweepResult result;
  result.cells.resize(total);
  auto slot = [nt](int t_index, int replica) { return replica * nt + t_index; };

  int threads = config.threads > 0
                    ? config.threads
                    : static_cast<int>(
                          std::max(1u, std::thread::hardware_concurrency()));

  if (config.annealed) {
    // Warm-started chains: sequential in T, parallel across replicas.
    std::atomic<int> next{0};
    auto chain = [&]() {
      for (int r = next.fetch_add(1); r < config.replicas;
           r = next.fetch_add(1)) {
        LatticeState carry;
        bool have_carry = false;
        for (int t = 0; t < nt; ++t) {
          LatticeState final_state;
          auto cell = run_cell(net, config, config.temperatures[t], t, r,
                               have_carry ? &carry : nullptr, &final_state);
          if (cell.ok) {
            carry = final_state;
            have_carry = true;
          }
          result.cells[slot(t, r)] = std::move(cell);
        }
      }
    };
    std::vector<std::thread> pool;
    const int workers = std::min(threads, config.replicas);
    for (int w = 1; w < workers; ++w) pool.emplace_back(chain);
    chain();
    for (auto& th : pool) th.join();
  } else {
    std::atomic<int> next{0};
    auto worker = [&]() {
      for (int k = next.fetch_add(1); k < total; k = next.fetch_add(1)) {
        const int t = k % nt;
        const int r = k / nt;
        result.cells[slot(t, r)] = run_cell(
            net, config, config.temperatures[t], t, r, nullptr, nullptr);
      }
    };
    std::vector<std::thread> pool;
    const int workers = std::min(threads, total);
    for (int w = 1; w < workers; ++w) pool.emplace_back(worker);
    worker();
    for (auto& th : pool) th.join();
  }

  // Per-temperature aggregation over replicas (order independent).
  result.aggregates.resize(nt);
  for (int t = 0; t < nt; ++t) {
    auto& agg = result.aggregates[t];
    agg.temperature = config.temperatures[t];
    std::vector<Eigen::Vector3d> params;
    std::vector<double> mags;
    for (int r = 0; r < config.replicas; ++r) {
      const auto& cell = result.cells[slot(t, r)];
      if (!cell.ok) continue;
      const Eigen::Vector3d m = config.model == ModelKind::RigidBody
                                    ? cell.observables.mean_momentum
                                    : cell.observables.mean_position;
      const Eigen::Vector3d a = config.model == ModelKind::RigidBody
                                    ? cell.observables.abs_mean_momentum
                                    : cell.observables.abs_mean_position;
      params.push_back(m);
      mags.push_back(cell.observables.magnetisation);
      agg.mean += m;
      agg.abs_mean += a;
      agg.magnitude_mean += cell.observables.magnetisation;
    }
    agg.cells = static_cast<int>(params.size());
    if (agg.cells == 0) continue;
    const double inv = 1.0 / agg.cells;
    agg.mean *= inv;
    agg.abs_mean *= inv;
    agg.magnitude_mean *= inv;
    for (const auto& m : params) {
      const Eigen::Vector3d d = m - agg.mean;
      agg.stddev += d.cwiseProduct(d);
      agg.magnitude_std += (m.norm() - agg.magnitude_mean) *
                           (m.norm() - agg.magnitude_mean);
    }
    agg.stddev = (agg.stddev * inv).cwiseSqrt();
    agg.magnitude_std = std::sqrt(agg.magnitude_std * inv);
    for (int c = 0; c < 3; ++c) {
      std::vector<double> vals;
      vals.reserve(params.size());
      for (const auto& m : params) vals.push_back(m[c]);
      agg.median[c] = component_median(std::move(vals));
    }
    agg.magnitude_median = component_median(std::move(mags));
  }
  return result;
}

std::vector<TransitionEstimate> detect_transitions(
    const std::vector<double>& temperatures,
    const std::vector<double>& series) {
  const int n = static_cast<int>(temperatures.size());
  if (n != static_cast<int>(series.size())) {
    throw ConfigError("temperature and series lengths differ");
  }
  if (n < 5) throw TooFewPoints("need at least 5 grid points");

  // Central-difference slope magnitudes at interior points.
  std::vector<double> slope(n, 0.0);
  for (int k = 1; k + 1 < n; ++k) {
    slope[k] = std::abs((series[k + 1] - series[k - 1]) /
                        (temperatures[k + 1] - temperatures[k - 1]));
  }
  double g_min = slope[1], g_max = slope[1];
  for (int k = 1; k + 1 < n; ++k) {
    g_min = std::min(g_min, slope[k]);
    g_max = std::max(g_max, slope[k]);
  }
  const double range = g_max - g_min;
  const double flat_tol = 1e-12 * std::max(1.0, g_max);

  std::vector<TransitionEstimate> out;
  int k = 1;
  while (k + 1 < n) {
    // Plateau of (nearly) equal slope values.
    int end = k;
    while (end + 2 < n && std::abs(slope[end + 1] - slope[k]) <= flat_tol) {
      ++end;
    }
    const double left = k > 1 ? slope[k - 1] : -1.0;
    const double right = end + 2 < n ? slope[end + 1] : -1.0;
    const bool is_max = slope[k] >= left && slope[k] >= right;
    if (is_max && slope[k] > 0.0) {
      const int mid = (k + end) / 2;
      TransitionEstimate est;
      est.temperature = temperatures[mid];
      est.uncertainty = 0.5 * (temperatures[mid + 1] - temperatures[mid - 1]);
      est.strength = slope[mid];
      const double prominence =
          slope[mid] - std::max({left < 0.0 ? g_min : left,
                                 right < 0.0 ? g_min : right, 0.0});
      est.weak = range <= flat_tol || prominence < 0.1 * range;
      out.push_back(est);
    }
    k = end + 1;
  }
  // Side bumps well below the dominant slope peak do not count as knees.
  double best = 0.0;
  for (const auto& e : out) best = std::max(best, e.strength);
  for (auto& e : out) {
    if (e.strength < 0.2 * best) e.weak = true;
  }
  return out;
}

std::vector<TransitionEstimate> detect_transitions(const SweepResult& result,
                                                   SweepComponent component) {
  std::vector<double> t, m;
  for (const auto& agg : result.aggregates) {
    if (agg.cells == 0) continue;
    t.push_back(agg.temperature);
    switch (component) {
      case SweepComponent::X: m.push_back(std::abs(agg.mean[0])); break;
      case SweepComponent::Y: m.push_back(std::abs(agg.mean[1])); break;
      case SweepComponent::Z: m.push_back(std::abs(agg.mean[2])); break;
      case SweepComponent::Magnitude: m.push_back(agg.magnitude_mean); break;
      case SweepComponent::AbsX: m.push_back(agg.abs_mean[0]); break;
      case SweepComponent::AbsY: m.push_back(agg.abs_mean[1]); break;
      case SweepComponent::AbsZ: m.push_back(agg.abs_mean[2]); break;
    }
  }
  return detect_transitions(t, m);
}

}  // namespace lpnet
