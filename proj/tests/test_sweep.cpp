#include <doctest.h>

#include <cmath>

#include "helpers.hpp"
#include "lpnet/sweep.hpp"

using namespace lpnet;
using Eigen::Matrix3d;
using Eigen::Vector3d;

namespace {
const Matrix3d kId = Matrix3d::Identity();
Matrix3d diag(double a, double b, double c) {
  return Vector3d(a, b, c).asDiagonal();
}
}  // namespace

TEST_CASE("initial-condition policies hit the prescribed orbits") {
  const auto net = Network::lattice2d(3, 3, true, diag(1, 2, 3), kId);

  InitialCondition random;
  const auto rb = draw_initial_state(net, ModelKind::RigidBody, random, 1.4,
                                     0, 0, 1.0, 5);
  for (const auto& pi : rb.momentum) {
    CHECK(pi.norm() == doctest::Approx(1.4).epsilon(1e-12));
  }

  const auto ht = draw_initial_state(net, ModelKind::HeavyTop, random, 0, 0.8,
                                     1.3, 0.7, 6);
  const auto levels = casimir_levels(ht);
  for (int i = 0; i < net.nodes(); ++i) {
    CHECK(levels.c1[i] == doctest::Approx(0.8).epsilon(1e-12));
    CHECK(levels.c2[i] == doctest::Approx(1.3).epsilon(1e-12));
  }

  InitialCondition ferro;
  ferro.policy = InitialCondition::Policy::NearFerro;
  ferro.axis = 1;
  ferro.perturbation = 0.05;
  const auto near = draw_initial_state(net, ModelKind::HeavyTop, ferro, 0, 1.0,
                                       1.0, 0.5, 7);
  const auto ferro_levels = casimir_levels(near);
  for (int i = 0; i < net.nodes(); ++i) {
    CHECK(ferro_levels.c1[i] == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(ferro_levels.c2[i] == doctest::Approx(1.0).epsilon(1e-12));
  }
  CHECK(mean_position(near)[1] > 0.9);
}

TEST_CASE("single-cell sweep equals a direct run") {
  const auto net = Network::lattice2d(3, 3, true, kId, 0.4 * kId);
  SweepConfig cfg;
  cfg.model = ModelKind::RigidBody;
  cfg.temperatures = {0.5};
  cfg.theta = 1.0;
  cfg.dt = 2e-3;
  cfg.steps = 500;
  cfg.record_every = 10;
  cfg.burn_in = 0.5;
  cfg.base_seed = 42;

  const auto result = run_sweep(net, cfg);
  REQUIRE(result.cells.size() == 1);
  REQUIRE(result.cells[0].ok);

  // replay the cell by hand
  const std::uint64_t seed = mix_seed(42, 0, 0);
  const auto s0 = draw_initial_state(net, cfg.model, cfg.init, cfg.radius,
                                     cfg.c1, cfg.c2, 0.5, seed);
  IntegratorConfig icfg;
  icfg.dt = cfg.dt;
  icfg.steps = cfg.steps;
  icfg.theta = cfg.theta;
  icfg.sigma = Temperature{0.5}.sigma(cfg.theta);
  icfg.seed = seed;
  icfg.record_every = cfg.record_every;
  icfg.projection = cfg.projection;
  const auto obs = observables_from_trajectory(run(net, s0, icfg), cfg.burn_in);
  CHECK(obs.mean_momentum == result.cells[0].observables.mean_momentum);
  CHECK(obs.mean_energy == result.cells[0].observables.mean_energy);
}

TEST_CASE("sweeps are deterministic and thread-count independent") {
  const auto net = Network::lattice2d(3, 3, true, kId, 0.4 * kId);
  SweepConfig cfg;
  cfg.model = ModelKind::RigidBody;
  cfg.temperatures = {0.2, 0.6, 1.2};
  cfg.dt = 2e-3;
  cfg.steps = 400;
  cfg.record_every = 20;
  cfg.replicas = 2;
  cfg.base_seed = 9;

  cfg.threads = 1;
  const auto serial = run_sweep(net, cfg);
  cfg.threads = 4;
  const auto parallel = run_sweep(net, cfg);
  REQUIRE(serial.cells.size() == parallel.cells.size());
  for (size_t k = 0; k < serial.cells.size(); ++k) {
    CHECK(serial.cells[k].seed == parallel.cells[k].seed);
    CHECK(serial.cells[k].observables.mean_momentum ==
          parallel.cells[k].observables.mean_momentum);
    CHECK(serial.cells[k].observables.mean_energy ==
          parallel.cells[k].observables.mean_energy);
  }
  for (size_t t = 0; t < serial.aggregates.size(); ++t) {
    CHECK(serial.aggregates[t].mean == parallel.aggregates[t].mean);
  }
}

TEST_CASE("sweep config validation") {
  SweepConfig cfg;
  cfg.temperatures = {};
  CHECK_THROWS_AS(cfg.validate(), ConfigError);
  cfg.temperatures = {0.5, 0.5};
  CHECK_THROWS_AS(cfg.validate(), ConfigError);
  cfg.temperatures = {0.5, -0.1};
  CHECK_THROWS_AS(cfg.validate(), ConfigError);
}

TEST_CASE("transition detector: flat, tanh and three-band series") {
  // monotone linear: a single interior estimate flagged weak
  std::vector<double> t, m;
  for (int k = 0; k <= 10; ++k) {
    t.push_back(1.0 + 0.1 * k);
    m.push_back(2.0 - 0.15 * k);
  }
  const auto flat = detect_transitions(t, m);
  REQUIRE(flat.size() == 1);
  CHECK(flat[0].weak);
  CHECK(flat[0].temperature > t.front());
  CHECK(flat[0].temperature < t.back());

  // synthetic tanh knee at T_c = 2.0, width 0.1, grid step 0.05
  t.clear();
  m.clear();
  for (double T = 1.0; T <= 3.0 + 1e-9; T += 0.05) {
    t.push_back(T);
    m.push_back(0.5 * (1.0 + std::tanh((2.0 - T) / 0.1)));
  }
  const auto knee = detect_transitions(t, m);
  REQUIRE(knee.size() >= 1);
  int strong = 0;
  double location = 0.0;
  for (const auto& est : knee) {
    if (!est.weak) {
      ++strong;
      location = est.temperature;
    }
  }
  CHECK(strong == 1);
  CHECK(std::abs(location - 2.0) <= 0.05 + 1e-12);

  // three plateaus -> three estimates in increasing order
  t.clear();
  m.clear();
  for (double T = 0.5; T <= 4.5 + 1e-9; T += 0.1) {
    t.push_back(T);
    double value = 0.0;
    for (const double tc : {1.0, 2.0, 3.0}) {
      value += 0.5 * (1.0 + std::tanh((tc - T) / 0.08));
    }
    m.push_back(value / 3.0);
  }
  const auto bands = detect_transitions(t, m);
  std::vector<double> strong_locations;
  for (const auto& est : bands) {
    if (!est.weak) strong_locations.push_back(est.temperature);
  }
  REQUIRE(strong_locations.size() == 3);
  CHECK(std::abs(strong_locations[0] - 1.0) <= 0.1 + 1e-12);
  CHECK(std::abs(strong_locations[1] - 2.0) <= 0.1 + 1e-12);
  CHECK(std::abs(strong_locations[2] - 3.0) <= 0.1 + 1e-12);

  CHECK_THROWS_AS(detect_transitions({1.0, 2.0, 3.0}, {1.0, 0.5, 0.2}),
                  TooFewPoints);
}

TEST_CASE("failed cells are recorded, the sweep continues") {
  const auto net = Network::single(diag(1, 2, 3));
  SweepConfig cfg;
  cfg.model = ModelKind::RigidBody;
  cfg.temperatures = {1e290, 2e290};  // sigma overflows the state quickly
  cfg.theta = 1.0;
  cfg.dt = 1e3;
  cfg.steps = 50;
  cfg.record_every = 10;
  cfg.burn_in = 0.0;
  cfg.projection = false;
  const auto result = run_sweep(net, cfg);
  int failed = 0;
  for (const auto& cell : result.cells) {
    if (!cell.ok) {
      ++failed;
      CHECK(!cell.error.empty());
    }
  }
  CHECK(failed == 2);
}
