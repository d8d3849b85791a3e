#include "resonance/noise.hpp"

#include <cmath>
#include <numbers>

namespace resonance {

namespace {

constexpr std::uint32_t kM0 = 0xD2511F53u;
constexpr std::uint32_t kM1 = 0xCD9E8D57u;
constexpr std::uint32_t kW0 = 0x9E3779B9u;
constexpr std::uint32_t kW1 = 0xBB67AE85u;

inline void mulhilo(std::uint32_t a, std::uint32_t b, std::uint32_t& hi, std::uint32_t& lo) {
  const std::uint64_t p = static_cast<std::uint64_t>(a) * b;
  hi = static_cast<std::uint32_t>(p >> 32);
  lo = static_cast<std::uint32_t>(p);
}

inline double unit_open_closed(std::uint32_t hi, std::uint32_t lo) {
  const std::uint64_t bits = ((static_cast<std::uint64_t>(hi) << 32) | lo) >> 11;
  return (static_cast<double>(bits) + 1.0) * 0x1.0p-53;
}

}  // namespace

PhiloxBlock philox4x32(PhiloxBlock ctr, PhiloxKey key) {
  for (int round = 0; round < 10; ++round) {
    if (round > 0) {
      key[0] += kW0;
      key[1] += kW1;
    }
    std::uint32_t hi0, lo0, hi1, lo1;
    mulhilo(kM0, ctr[0], hi0, lo0);
    mulhilo(kM1, ctr[2], hi1, lo1);
    ctr = {hi1 ^ ctr[1] ^ key[0], lo1, hi0 ^ ctr[3] ^ key[1], lo0};
  }
  return ctr;
}

Eigen::Vector2d NoiseStream::uniforms(std::uint64_t step) const {
  const PhiloxBlock ctr{static_cast<std::uint32_t>(step), static_cast<std::uint32_t>(step >> 32),
                        static_cast<std::uint32_t>(path_), static_cast<std::uint32_t>(path_ >> 32)};
  const PhiloxKey key{static_cast<std::uint32_t>(seed_), static_cast<std::uint32_t>(seed_ >> 32)};
  const PhiloxBlock out = philox4x32(ctr, key);
  return {unit_open_closed(out[0], out[1]), unit_open_closed(out[2], out[3])};
}

Eigen::Vector2d NoiseStream::normals(std::uint64_t step) const {
  const Eigen::Vector2d u = uniforms(step);
  const double radius = std::sqrt(-2.0 * std::log(u(0)));
  const double angle = 2.0 * std::numbers::pi * u(1);
  return {radius * std::cos(angle), radius * std::sin(angle)};
}

}  // namespace resonance
