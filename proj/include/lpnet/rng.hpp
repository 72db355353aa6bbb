#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <numbers>

#include <Eigen/Dense>

// Counter-based random numbers (Philox4x32-10). Every draw is a pure
// function of (seed, step, node, domain), so per-node noise streams are
// reproducible regardless of evaluation order or thread scheduling.

namespace lpnet {

namespace detail {

inline void philox_round(std::array<std::uint32_t, 4>& ctr,
                         std::array<std::uint32_t, 2>& key) {
  constexpr std::uint64_t kMul0 = 0xD2511F53;
  constexpr std::uint64_t kMul1 = 0xCD9E8D57;
  const std::uint64_t p0 = kMul0 * ctr[0];
  const std::uint64_t p1 = kMul1 * ctr[2];
  const std::array<std::uint32_t, 4> out = {
      static_cast<std::uint32_t>(p1 >> 32) ^ ctr[1] ^ key[0],
      static_cast<std::uint32_t>(p1),
      static_cast<std::uint32_t>(p0 >> 32) ^ ctr[3] ^ key[1],
      static_cast<std::uint32_t>(p0)};
  ctr = out;
  key[0] += 0x9E3779B9;
  key[1] += 0xBB67AE85;
}

}  // namespace detail

/// One 128-bit Philox4x32-10 block.
inline std::array<std::uint32_t, 4> philox4x32(std::array<std::uint32_t, 4> ctr,
                                               std::uint64_t seed) {
  std::array<std::uint32_t, 2> key = {static_cast<std::uint32_t>(seed),
                                      static_cast<std::uint32_t>(seed >> 32)};
  for (int round = 0; round < 10; ++round) detail::philox_round(ctr, key);
  return ctr;
}

/// Keyed random stream. `domain` separates independent uses of the same seed
/// (integrator noise, initial conditions, Monte-Carlo estimators, ...).
class RandomStream {
 public:
  explicit RandomStream(std::uint64_t seed, std::uint32_t domain = 0)
      : seed_(seed), domain_(domain) {}

  std::uint64_t seed() const { return seed_; }

  /// Four uniforms in (0,1), one block.
  std::array<double, 4> uniform4(std::uint64_t step, std::uint32_t node) const {
    const auto b = philox4x32(
        {static_cast<std::uint32_t>(step), static_cast<std::uint32_t>(step >> 32),
         node, domain_},
        seed_);
    auto u01 = [](std::uint32_t x) { return (x + 0.5) * 0x1p-32; };
    return {u01(b[0]), u01(b[1]), u01(b[2]), u01(b[3])};
  }

  /// Three independent standard normals (Box-Muller on one block).
  Eigen::Vector3d normal3(std::uint64_t step, std::uint32_t node) const {
    const auto u = uniform4(step, node);
    const double r0 = std::sqrt(-2.0 * std::log(u[0]));
    const double r1 = std::sqrt(-2.0 * std::log(u[2]));
    const double a0 = 2.0 * std::numbers::pi * u[1];
    const double a1 = 2.0 * std::numbers::pi * u[3];
    return {r0 * std::cos(a0), r0 * std::sin(a0), r1 * std::cos(a1)};
  }

  /// Uniform point on the unit sphere.
  Eigen::Vector3d sphere(std::uint64_t step, std::uint32_t node = 0) const {
    const auto u = uniform4(step, node);
    const double z = 2.0 * u[0] - 1.0;
    const double phi = 2.0 * std::numbers::pi * u[1];
    const double s = std::sqrt(std::max(0.0, 1.0 - z * z));
    return {s * std::cos(phi), s * std::sin(phi), z};
  }

  double uniform(std::uint64_t step, std::uint32_t node = 0) const {
    return uniform4(step, node)[0];
  }

 private:
  std::uint64_t seed_;
  std::uint32_t domain_;
};

/// Stream domains used across the library.
enum RngDomain : std::uint32_t {
  kNoiseDomain = 0,
  kInitDomain = 1,
  kMonteCarloDomain = 2,
};

/// splitmix64 mix, used to derive child seeds (sweep cells, replicas).
inline std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t a,
                              std::uint64_t b = 0) {
  std::uint64_t z = seed + 0x9E3779B97F4A7C15ull * (a + 1) +
                    0xBF58476D1CE4E5B9ull * (b + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

}  // namespace lpnet
