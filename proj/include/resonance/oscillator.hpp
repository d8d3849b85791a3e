#pragma once

#include <Eigen/Dense>

namespace resonance {

// Angle-amplitude coordinates on one orbit of the unperturbed oscillator.
struct AngleCoords {
  Eigen::Vector2d X;
  Eigen::Vector2d X_phi;
  Eigen::Vector2d X_r;
};

struct ActionAngle {
  double r;
  double phi;  // in [0, 2*pi)
};

// Softening Duffing well U(x) = x^2/2 - theta x^4/4, orbits labelled by 2U(x1) + x2^2 = r^2.
class DuffingOscillator {
 public:
  explicit DuffingOscillator(double theta);

  double theta() const { return theta_; }
  double r_max() const { return r_max_; }
  double potential(double x) const { return x * x / 2 - theta_ * x * x * x * x / 4; }
  double force(double x) const { return x - theta_ * x * x * x; }  // U'(x)

  double modulus(double r) const;
  double frequency(double r) const;
  double frequency_derivative(double r) const;
  double fd_step(double r) const;

  Eigen::Vector2d position(double phi, double r) const;
  AngleCoords angle_coords(double phi, double r) const;
  // Second r-derivative of X by a three-point difference.
  Eigen::Vector2d position_rr(double phi, double r) const;

  double resonant_amplitude(double nu_target) const;
  ActionAngle action_angle_from_state(double x1, double x2) const;

 private:
  void check_amplitude(double r) const;

  double theta_;
  double r_max_;
};

}  // namespace resonance
