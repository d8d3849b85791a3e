#include "resonance/oscillator.hpp"

#include <boost/math/special_functions/ellint_1.hpp>
#include <boost/math/tools/roots.hpp>
#include <cmath>
#include <numbers>
#include <string>

#include "resonance/errors.hpp"
#include "resonance/specfun.hpp"

namespace resonance {

DuffingOscillator::DuffingOscillator(double theta) : theta_(theta) {
  if (!(theta > 0.0) || !std::isfinite(theta)) throw DomainError("Duffing parameter theta must be positive");
  r_max_ = 1.0 / std::sqrt(2.0 * theta);
}

void DuffingOscillator::check_amplitude(double r) const {
  if (!(std::abs(r) < r_max_)) {
    throw OutOfWellError("amplitude " + std::to_string(r) + " outside the well (|r| < " + std::to_string(r_max_) + ")");
  }
}

double DuffingOscillator::modulus(double r) const {
  check_amplitude(r);
  r = std::abs(r);
  if (r == 0.0) return 0.0;
  const double s = std::sqrt(2.0 / theta_) / r;
  return 2.0 / (s + std::sqrt((s - 2.0) * (s + 2.0)));
}

double DuffingOscillator::frequency(double r) const {
  const double k = modulus(r);
  return std::numbers::pi / (2.0 * ellint_k(k) * std::sqrt(1.0 + k * k));
}

double DuffingOscillator::fd_step(double r) const {
  double h = std::max(1e-6, 1e-8 * std::abs(r));
  h = std::max(h, 1e-5 * std::abs(r));
  const double room = r_max_ - std::abs(r);
  if (h > room / 4) h = room / 4;
  return h;
}

double DuffingOscillator::frequency_derivative(double r) const {
  check_amplitude(r);
  const double h = std::min(std::max(1e-6, 1e-8 * std::abs(r)), (r_max_ - std::abs(r)) / 4);
  return (frequency(std::abs(r + h)) - frequency(std::abs(r - h))) / (2.0 * h);
}

Eigen::Vector2d DuffingOscillator::position(double phi, double r) const {
  const double k = modulus(r);
  const double nu = frequency(r);
  const double w = std::sqrt(1.0 + k * k);
  const auto j = jacobi_sn_cn_dn(phi / (nu * w), k);
  return {r * w * j.sn, r * j.cn * j.dn};
}

AngleCoords DuffingOscillator::angle_coords(double phi, double r) const {
  check_amplitude(r);
  AngleCoords out;
  out.X = position(phi, r);
  const double nu = frequency(r);
  out.X_phi = {out.X(1) / nu, -force(out.X(0)) / nu};
  const double h = fd_step(r);
  out.X_r = (position(phi, r + h) - position(phi, r - h)) / (2.0 * h);
  return out;
}

Eigen::Vector2d DuffingOscillator::position_rr(double phi, double r) const {
  check_amplitude(r);
  const double h = std::min(1e-4 * std::max(std::abs(r), 1e-2), (r_max_ - std::abs(r)) / 4);
  return (position(phi, r + h) - 2.0 * position(phi, r) + position(phi, r - h)) / (h * h);
}

double DuffingOscillator::resonant_amplitude(double nu_target) const {
  if (!(nu_target > 0.0 && nu_target < 1.0)) {
    throw NoResonanceError("target frequency " + std::to_string(nu_target) + " not in (0, 1)");
  }
  auto f = [&](double r) { return frequency(r) - nu_target; };
  const double hi = r_max_ * (1.0 - 1e-13);
  if (f(hi) > 0.0) throw NoResonanceError("target frequency below the range reachable in the well");
  auto tol = [](double a, double b) { return std::abs(b - a) <= 1e-15 * std::max(1.0, std::abs(a)); };
  const auto bracket = boost::math::tools::bisect(f, 0.0, hi, tol);
  return 0.5 * (bracket.first + bracket.second);
}

ActionAngle DuffingOscillator::action_angle_from_state(double x1, double x2) const {
  if (std::abs(x1) >= 1.0 / std::sqrt(theta_)) throw OutOfWellError("state beyond the potential maximum");
  const double r2 = 2.0 * potential(x1) + x2 * x2;
  const double r = std::sqrt(std::max(r2, 0.0));
  check_amplitude(r);
  if (r == 0.0) return {0.0, 0.0};
  const double k = modulus(r);
  const double w = std::sqrt(1.0 + k * k);
  const double sn = x1 / (r * w);
  const double dn = std::sqrt(std::max(0.0, 1.0 - k * k * sn * sn));
  const double cn = x2 / (r * dn);
  const double am = std::atan2(sn, cn);
  const double u = boost::math::ellint_1(k, am);
  double phi = std::fmod(frequency(r) * w * u, 2.0 * std::numbers::pi);
  if (phi < 0.0) phi += 2.0 * std::numbers::pi;
  return {r, phi};
}

}  // namespace resonance
