#pragma once

#include <Eigen/Dense>
#include <array>
#include <cstdint>

namespace resonance {

using PhiloxBlock = std::array<std::uint32_t, 4>;
using PhiloxKey = std::array<std::uint32_t, 2>;

// Philox4x32 with 10 rounds.
PhiloxBlock philox4x32(PhiloxBlock ctr, PhiloxKey key);

// Gaussian increments addressed by (seed, path, step); no internal state advances.
class NoiseStream {
 public:
  static constexpr std::uint64_t kInitStep = ~std::uint64_t{0};

  NoiseStream(std::uint64_t seed, std::uint64_t path) : seed_(seed), path_(path) {}

  std::uint64_t seed() const { return seed_; }
  std::uint64_t path() const { return path_; }

  // Two uniforms in (0, 1].
  Eigen::Vector2d uniforms(std::uint64_t step) const;
  // Two independent standard normals (Box-Muller).
  Eigen::Vector2d normals(std::uint64_t step) const;
  Eigen::Vector2d increment(std::uint64_t step, double dt) const { return std::sqrt(dt) * normals(step); }

 private:
  std::uint64_t seed_;
  std::uint64_t path_;
};

}  // namespace resonance
