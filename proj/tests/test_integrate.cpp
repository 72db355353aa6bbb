#include <doctest.h>

#include "helpers.hpp"
#include "lpnet/integrate.hpp"

using namespace lpnet;
using Eigen::Matrix3d;
using Eigen::Vector3d;

namespace {
const Matrix3d kId = Matrix3d::Identity();
Matrix3d diag(double a, double b, double c) {
  return Vector3d(a, b, c).asDiagonal();
}

double max_casimir_drift(const Trajectory& traj) {
  const auto& first = traj.casimirs.front();
  double drift = 0.0;
  for (const auto& levels : traj.casimirs) {
    for (size_t i = 0; i < first.c1.size(); ++i) {
      drift = std::max(drift, std::abs(levels.c1[i] - first.c1[i]) /
                                  std::max(std::abs(first.c1[i]), 1e-12));
    }
    for (size_t i = 0; i < first.c2.size(); ++i) {
      drift = std::max(drift, std::abs(levels.c2[i] - first.c2[i]) /
                                  std::max(std::abs(first.c2[i]), 1e-12));
    }
  }
  return drift;
}
}  // namespace

TEST_CASE("config validation and sample counts") {
  IntegratorConfig cfg;
  cfg.steps = 0;
  CHECK_THROWS_AS(cfg.validate(), ConfigError);
  cfg.steps = 1;
  cfg.dt = 0.0;
  CHECK_THROWS_AS(cfg.validate(), ConfigError);

  const auto net = Network::single(diag(1, 2, 3));
  LatticeState s0 = LatticeState::rigid_body(1);
  s0.momentum[0] = Vector3d(0.2, 0.5, 0.8);
  IntegratorConfig one;
  one.steps = 1;
  one.record_every = 1;
  const auto traj = run(net, s0, one);
  CHECK(traj.samples() == 2);

  IntegratorConfig ten;
  ten.steps = 10;
  ten.record_every = 3;
  CHECK(run(net, s0, ten).samples() == 4);  // steps 0, 3, 6, 9 -> 10/3+1
}

TEST_CASE("free rigid body conservation at RK4 accuracy") {
  const auto net = Network::single(diag(1, 2, 3));
  LatticeState s0 = LatticeState::rigid_body(1);
  s0.momentum[0] = Vector3d(0.4, 0.7, -0.5);
  IntegratorConfig cfg;
  cfg.dt = 1e-3;
  cfg.steps = 10000;
  cfg.record_every = 100;
  const auto traj = run(net, s0, cfg);
  CHECK(max_casimir_drift(traj) < 1e-10);
  const double e0 = traj.energies.front();
  for (const double e : traj.energies) {
    CHECK(std::abs(e - e0) < 1e-10 * std::abs(e0));
  }
}

TEST_CASE("deterministic runs are reproducible and dissipative runs decay") {
  const auto net = Network::from_edges(2, {{0, 1}}, kId, 0.5 * kId);
  const auto s0 = testing::random_rb_state(net, 1.0, 99);

  IntegratorConfig cfg;
  cfg.dt = 1e-3;
  cfg.steps = 2000;
  cfg.theta = 0.5;
  cfg.record_every = 10;
  cfg.seed = 7;
  const auto a = run(net, s0, cfg);
  const auto b = run(net, s0, cfg);
  for (int k = 0; k < a.samples(); ++k) {
    for (int i = 0; i < 2; ++i) {
      CHECK(a.states[k].momentum[i] == b.states[k].momentum[i]);
    }
  }
  for (int k = 1; k < a.samples(); ++k) {
    CHECK(a.energies[k] <= a.energies[k - 1] + 1e-12 * cfg.record_every);
  }
}

TEST_CASE("equilibrium states are fixed points of the stepper") {
  const auto net = Network::from_edges(2, {{0, 1}}, kId, kId);
  LatticeState ferro = LatticeState::rigid_body(2);
  ferro.momentum[0] = ferro.momentum[1] = Vector3d(0, 0, 1);
  const auto out = step_deterministic(net, ferro, 1e-3, 0.0);
  for (int i = 0; i < 2; ++i) {
    CHECK((out.momentum[i] - ferro.momentum[i]).norm() < 1e-14);
  }
}

TEST_CASE("sigma = 0 delegates to the deterministic stepper bitwise") {
  const auto net = testing::random_network(6, 4, 700);
  const auto s = testing::random_rb_state(net, 1.0, 1);
  const RandomStream noise(3, kNoiseDomain);
  const auto det = step_deterministic(net, s, 2e-3, 0.3);
  const auto sto = step_stochastic(net, s, 2e-3, 0.3, 0.0, noise, 1);
  for (int i = 0; i < net.nodes(); ++i) {
    CHECK(det.momentum[i] == sto.momentum[i]);
  }
}

TEST_CASE("stochastic Casimir drift is small and shrinks with dt") {
  const auto net = Network::lattice2d(4, 4, true, kId, 0.3 * kId);

  auto drift_at = [&](double dt, std::uint64_t seed) {
    IntegratorConfig cfg;
    cfg.dt = dt;
    cfg.steps = static_cast<std::int64_t>(10.0 / dt);  // fixed horizon
    cfg.theta = 0.25;
    cfg.sigma = 0.5;
    cfg.seed = seed;
    cfg.record_every = cfg.steps / 10;
    const auto s0 = testing::random_rb_state(net, 1.0, seed);
    return max_casimir_drift(run(net, s0, cfg));
  };

  // The explicit Stratonovich-Heun corrector carries an intrinsic Casimir
  // bias of 2.5 sigma^4 dt per unit time (~1.6e-3 at this protocol); the
  // acceptance suite pins this protocol at its stated tolerance.
  double coarse = 0.0, fine = 0.0;
  for (std::uint64_t seed = 0; seed < 3; ++seed) {
    coarse += drift_at(1e-3, seed);
    fine += drift_at(5e-4, seed);
  }
  CHECK(coarse / 3.0 < 2.5e-3);
  CHECK(coarse / fine > 1.7);  // first-order drift in dt
}

TEST_CASE("casimir drift scales at least linearly over the dt grid") {
  const auto net = Network::lattice2d(3, 3, true, kId, 0.3 * kId);
  std::vector<double> dts = {4e-3, 2e-3, 1e-3, 5e-4};
  std::vector<double> drifts;
  for (const double dt : dts) {
    double total = 0.0;
    for (std::uint64_t seed = 0; seed < 3; ++seed) {
      IntegratorConfig cfg;
      cfg.dt = dt;
      cfg.steps = static_cast<std::int64_t>(8.0 / dt);
      cfg.theta = 0.25;
      cfg.sigma = 0.5;
      cfg.seed = seed;
      cfg.record_every = cfg.steps / 8;
      total += max_casimir_drift(run(net, testing::random_rb_state(net, 1.0, seed), cfg));
    }
    drifts.push_back(total / 3.0);
  }
  // log-log slope across the grid endpoints
  const double slope = std::log(drifts.front() / drifts.back()) /
                       std::log(dts.front() / dts.back());
  CHECK(slope >= 0.9);
}

TEST_CASE("heavy top stochastic drift stays small") {
  const auto net = Network::lattice2d(3, 3, true, diag(1, 2, 3), kId);
  IntegratorConfig cfg;
  cfg.dt = 1e-3;
  cfg.steps = 10000;
  cfg.theta = 0.25;
  cfg.sigma = 0.5;
  cfg.record_every = 1000;
  const auto s0 = testing::random_ht_state(net, 1.0, 1.0, 11);
  CHECK(max_casimir_drift(run(net, s0, cfg)) < 2.5e-3);
}

TEST_CASE("projection pins every per-node Casimir") {
  const auto net = Network::lattice2d(3, 3, true, diag(1, 2, 3), kId);
  IntegratorConfig cfg;
  cfg.dt = 2e-3;
  cfg.steps = 5000;
  cfg.theta = 1.0;
  cfg.sigma = 1.0;
  cfg.projection = true;
  cfg.record_every = 500;
  const auto s0 = testing::random_ht_state(net, 1.0, 1.0, 5);
  const auto traj = run(net, s0, cfg);
  CHECK(max_casimir_drift(traj) < 1e-12);
}

TEST_CASE("non-finite states are reported with the failing step") {
  const auto net = Network::single(diag(1, 2, 3));
  LatticeState s0 = LatticeState::rigid_body(1);
  s0.momentum[0] = Vector3d(1e200, 2e200, -1e200);
  IntegratorConfig cfg;
  cfg.dt = 1e100;
  cfg.steps = 10;
  try {
    run(net, s0, cfg);
    FAIL("expected NonFiniteState");
  } catch (const NonFiniteState& err) {
    CHECK(err.step >= 1);
  }
}
