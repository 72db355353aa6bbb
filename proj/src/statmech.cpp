#include "lpnet/statmech.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <vector>

#include "lpnet/error.hpp"
#include "lpnet/rng.hpp"

namespace lpnet {

Observables observables_from_trajectory(const Trajectory& traj,
                                        double burn_in) {
  if (burn_in < 0.0 || burn_in >= 1.0) {
    throw ConfigError("burn_in fraction must be in [0, 1)");
  }
  const std::int64_t n = traj.samples();
  const auto skip = static_cast<std::int64_t>(burn_in * static_cast<double>(n));
  if (skip >= n) throw EmptyWindow("no samples after burn-in");

  Observables obs;
  obs.burn_in_samples = skip;
  obs.samples = n - skip;
  double e_sum = 0.0, e2_sum = 0.0;
  for (std::int64_t k = skip; k < n; ++k) {
    const auto& s = traj.states[k];
    const Eigen::Vector3d m = mean_momentum(s);
    const Eigen::Vector3d g = mean_position(s);
    obs.mean_momentum += m;
    obs.mean_position += g;
    obs.abs_mean_momentum += m.cwiseAbs();
    obs.abs_mean_position += g.cwiseAbs();
    e_sum += traj.energies[k];
    e2_sum += traj.energies[k] * traj.energies[k];
  }
  const double inv = 1.0 / static_cast<double>(obs.samples);
  obs.mean_momentum *= inv;
  obs.mean_position *= inv;
  obs.abs_mean_momentum *= inv;
  obs.abs_mean_position *= inv;
  obs.mean_energy = e_sum * inv;
  obs.energy_variance = std::max(0.0, e2_sum * inv - obs.mean_energy * obs.mean_energy);
  const bool heavy = !traj.states.empty() &&
                     traj.states.front().kind() == ModelKind::HeavyTop;
  obs.magnetisation = heavy ? obs.mean_position.norm() : obs.mean_momentum.norm();
  return obs;
}

OrbitThermo orbit_thermo_single(const Eigen::Matrix3d& inertia, double radius,
                                double beta, std::int64_t n_samples,
                                std::uint64_t seed) {
  if (!(radius > 0.0)) throw ConfigError("orbit radius must be positive");
  if (beta < 0.0) throw ConfigError("beta must be non-negative");
  if (n_samples < 1000) throw ConfigError("need at least 1000 samples");

  const Eigen::Matrix3d inv = inertia.inverse();
  const RandomStream rng(seed, kMonteCarloDomain);

  // Energies on the orbit, with the Boltzmann weights shifted by the
  // analytic minimum r^2 / (2 max-eig(I)) for stable exponentials.
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> es(inertia);
  const double h0 = 0.5 * radius * radius / es.eigenvalues().maxCoeff();

  double w_sum = 0.0, w2_sum = 0.0;
  double hw_sum = 0.0, h2w_sum = 0.0;
  std::vector<double> h_vals(n_samples), w_vals(n_samples);
  for (std::int64_t k = 0; k < n_samples; ++k) {
    const Eigen::Vector3d pi = radius * rng.sphere(static_cast<std::uint64_t>(k));
    const double h = 0.5 * pi.dot(inv * pi);
    const double w = std::exp(-beta * (h - h0));
    h_vals[k] = h;
    w_vals[k] = w;
    w_sum += w;
    w2_sum += w * w;
    hw_sum += h * w;
    h2w_sum += h * h * w;
  }
  const double n = static_cast<double>(n_samples);
  const double area = 4.0 * std::numbers::pi * radius * radius;
  const double w_mean = w_sum / n;

  OrbitThermo out;
  out.partition = area * std::exp(-beta * h0) * w_mean;
  out.mean_energy = hw_sum / w_sum;
  out.energy_variance = std::max(0.0, h2w_sum / w_sum -
                                          out.mean_energy * out.mean_energy);
  out.entropy = std::log(out.partition) + beta * out.mean_energy;

  // Standard errors: plain for Z, delta method for the weighted ratios.
  const double w_var = std::max(0.0, w2_sum / n - w_mean * w_mean);
  out.se_partition = area * std::exp(-beta * h0) * std::sqrt(w_var / n);
  double num_e = 0.0, num_v = 0.0;
  for (std::int64_t k = 0; k < n_samples; ++k) {
    const double centered = h_vals[k] - out.mean_energy;
    const double de = w_vals[k] * centered;
    num_e += de * de;
    const double dv = w_vals[k] * (centered * centered - out.energy_variance);
    num_v += dv * dv;
  }
  out.se_mean_energy = std::sqrt(num_e) / w_sum;
  out.se_energy_variance = std::sqrt(num_v) / w_sum;
  const double rel_z = w_mean > 0.0 ? out.se_partition / out.partition : 0.0;
  out.se_entropy = std::sqrt(rel_z * rel_z + beta * beta * out.se_mean_energy *
                                                 out.se_mean_energy);
  return out;
}

namespace {

struct FixedPointFn {
  // Log-weight and value of sample k at mean field x.
  virtual double log_weight(std::int64_t k, const Eigen::Vector3d& x) const = 0;
  virtual const Eigen::Vector3d& value(std::int64_t k) const = 0;
  virtual std::int64_t count() const = 0;
  virtual ~FixedPointFn() = default;

  Eigen::Vector3d evaluate(const Eigen::Vector3d& x, double* se_norm) const {
    const std::int64_t m = count();
    std::vector<double> lw(m);
    double lw_max = -std::numeric_limits<double>::infinity();
    for (std::int64_t k = 0; k < m; ++k) {
      lw[k] = log_weight(k, x);
      lw_max = std::max(lw_max, lw[k]);
    }
    double den = 0.0;
    Eigen::Vector3d num = Eigen::Vector3d::Zero();
    for (std::int64_t k = 0; k < m; ++k) {
      const double w = std::exp(lw[k] - lw_max);
      lw[k] = w;  // reuse storage for the normalised weight
      den += w;
      num += w * value(k);
    }
    const Eigen::Vector3d f = num / den;
    if (se_norm != nullptr) {
      Eigen::Vector3d acc = Eigen::Vector3d::Zero();
      for (std::int64_t k = 0; k < m; ++k) {
        const Eigen::Vector3d d = lw[k] * (value(k) - f);
        acc += d.cwiseProduct(d);
      }
      *se_norm = std::sqrt(acc.sum()) / den;
    }
    return f;
  }
};

MeanFieldResult solve_fixed_point(const FixedPointFn& fn, double scale,
                                  const MeanFieldOptions& opt) {
  if (!(opt.damping > 0.0) || opt.damping > 1.0) {
    throw ConfigError("damping must lie in (0, 1]");
  }
  if (!(opt.tol > 0.0)) throw ConfigError("tol must be positive");

  MeanFieldResult best;
  bool have_best = false;
  for (int axis = 0; axis < 3; ++axis) {
    Eigen::Vector3d x = Eigen::Vector3d::Zero();
    x[axis] = 0.5 * scale;
    double delta_prev = -1.0;
    double contraction = 0.0;
    int used = 0;
    bool converged = false;
    for (int it = 0; it < opt.max_iter; ++it) {
      const Eigen::Vector3d f = fn.evaluate(x, nullptr);
      const Eigen::Vector3d x_next = (1.0 - opt.damping) * x + opt.damping * f;
      const double delta = (x_next - x).norm();
      if (delta_prev > 0.0) {
        contraction = 0.5 * contraction + 0.5 * std::min(delta / delta_prev, 2.0);
      }
      delta_prev = delta;
      x = x_next;
      used = it + 1;
      if (delta < opt.tol) {
        converged = true;
        break;
      }
    }
    double se = 0.0;
    fn.evaluate(x, &se);
    // Error of the fixed point itself: MC error of F amplified by the map
    // conditioning 1/(1 - F'), with F' recovered from the damped rate.
    const double fprime = std::clamp(
        (contraction - (1.0 - opt.damping)) / opt.damping, -0.99, 0.99);
    const double amplified = se / std::max(0.05, 1.0 - fprime);

    MeanFieldResult res;
    res.order_parameter = x;
    res.converged = converged;
    res.iterations = used;
    res.stderr_est = amplified;
    const bool better =
        !have_best ||
        (res.converged && !best.converged) ||
        (res.converged == best.converged &&
         res.order_parameter.norm() > best.order_parameter.norm());
    if (better) {
      best = res;
      have_best = true;
    }
  }
  return best;
}

struct RigidBodyMeanField final : FixedPointFn {
  std::vector<Eigen::Vector3d> points;
  std::vector<double> kinetic;
  Eigen::Matrix3d coupling;
  double beta;

  double log_weight(std::int64_t k, const Eigen::Vector3d& x) const override {
    return beta * (points[k].dot(coupling * x) - kinetic[k]);
  }
  const Eigen::Vector3d& value(std::int64_t k) const override {
    return points[k];
  }
  std::int64_t count() const override {
    return static_cast<std::int64_t>(points.size());
  }
};

struct HeavyTopMeanField final : FixedPointFn {
  std::vector<Eigen::Vector3d> gammas;
  std::vector<double> log_fiber;  // kinetic Boltzmann / importance density
  Eigen::Matrix3d coupling;
  double beta;

  double log_weight(std::int64_t k, const Eigen::Vector3d& x) const override {
    return beta * gammas[k].dot(coupling * x) + log_fiber[k];
  }
  const Eigen::Vector3d& value(std::int64_t k) const override {
    return gammas[k];
  }
  std::int64_t count() const override {
    return static_cast<std::int64_t>(gammas.size());
  }
};

}  // namespace

namespace {

RigidBodyMeanField make_rb_samples(const Eigen::Matrix3d& inertia,
                                   const Eigen::Matrix3d& coupling,
                                   double radius, double beta,
                                   const MeanFieldOptions& opt) {
  if (!(radius > 0.0)) throw ConfigError("orbit radius must be positive");
  if (beta < 0.0) throw ConfigError("beta must be non-negative");

  const std::int64_t half = std::max<std::int64_t>(1, opt.mc_samples / 2);
  const Eigen::Matrix3d inv = inertia.inverse();
  const RandomStream rng(opt.seed, kMonteCarloDomain);

  RigidBodyMeanField fn;
  fn.coupling = coupling;
  fn.beta = beta;
  fn.points.reserve(2 * half);
  fn.kinetic.reserve(2 * half);
  // Antithetic pairs make the beta = 0 estimate vanish exactly.
  for (std::int64_t k = 0; k < half; ++k) {
    const Eigen::Vector3d p = radius * rng.sphere(static_cast<std::uint64_t>(k));
    const double kin = 0.5 * p.dot(inv * p);
    fn.points.push_back(p);
    fn.kinetic.push_back(kin);
    fn.points.push_back(-p);
    fn.kinetic.push_back(kin);
  }
  return fn;
}

}  // namespace

MeanFieldResult meanfield_rb(const Eigen::Matrix3d& inertia,
                             const Eigen::Matrix3d& coupling, double radius,
                             double beta, const MeanFieldOptions& opt) {
  return solve_fixed_point(make_rb_samples(inertia, coupling, radius, beta, opt),
                           radius, opt);
}

Eigen::Vector3d meanfield_rb_map(const Eigen::Matrix3d& inertia,
                                 const Eigen::Matrix3d& coupling, double radius,
                                 double beta, const Eigen::Vector3d& x,
                                 const MeanFieldOptions& opt, double* se) {
  return make_rb_samples(inertia, coupling, radius, beta, opt).evaluate(x, se);
}

MeanFieldResult meanfield_ht(const Eigen::Matrix3d& inertia,
                             const Eigen::Matrix3d& coupling, double c1,
                             double c2, double beta,
                             const MeanFieldOptions& opt) {
  if (!(c2 > 0.0)) throw ConfigError("c2 must be positive");
  if (beta < 0.0) throw ConfigError("beta must be non-negative");

  const std::int64_t half = std::max<std::int64_t>(1, opt.mc_samples / 2);
  const Eigen::Matrix3d inv = inertia.inverse();
  const RandomStream rng(opt.seed, kMonteCarloDomain);
  const double r2 = std::sqrt(c2);

  // Fiber importance width matched to the kinetic Gaussian.
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> es(inertia);
  const double s =
      beta > 0.0 ? std::sqrt(es.eigenvalues().maxCoeff() / beta) : 1.0;

  HeavyTopMeanField fn;
  fn.coupling = coupling;
  fn.beta = beta;
  fn.gammas.reserve(2 * half);
  fn.log_fiber.reserve(2 * half);
  const double log_q_norm = std::log(2.0 * std::numbers::pi * s * s);
  for (std::int64_t k = 0; k < half; ++k) {
    const Eigen::Vector3d u = rng.sphere(static_cast<std::uint64_t>(k), 0);
    const Eigen::Vector3d xi = rng.normal3(static_cast<std::uint64_t>(k), 1);
    const Eigen::Vector3d t1 = u.unitOrthogonal();
    const Eigen::Vector3d t2 = u.cross(t1);
    const Eigen::Vector3d gamma = r2 * u;
    const Eigen::Vector3d v = s * (xi[0] * t1 + xi[1] * t2);
    const Eigen::Vector3d pi = (c1 / c2) * gamma + v;
    // w = exp(-beta Pi.I^{-1}Pi/2) / q(v) under the flat fiber measure.
    const double lf = -0.5 * beta * pi.dot(inv * pi) +
                      0.5 * (xi[0] * xi[0] + xi[1] * xi[1]) + log_q_norm;
    fn.gammas.push_back(gamma);
    fn.log_fiber.push_back(lf);
    // Antithetic partner (-Gamma, -Pi): same fiber weight by symmetry.
    fn.gammas.push_back(-gamma);
    fn.log_fiber.push_back(lf);
  }
  return solve_fixed_point(fn, r2, opt);
}

}  // namespace lpnet
