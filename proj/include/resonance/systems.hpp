#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <string>
#include <tuple>
#include <vector>

#include "resonance/envelope.hpp"
#include "resonance/oscillator.hpp"
#include "resonance/trigpoly.hpp"

namespace resonance {

enum class Chart { Polar, Cartesian };

struct ResonanceData {
  int n = 2;
  int p = 1;
  int kappa = 1;
  int varkappa = 1;
  double r0 = 0.0;
  double eta = 0.0;
};

// Identifies one coefficient function of the (r, phi) drift or diffusion:
// drift a_{component, order}, or diffusion alpha_{component, column, order}.
struct CoefficientTag {
  bool diffusion = false;
  int component = 0;  // 0 -> r row, 1 -> phi row
  int column = 0;
  int order = 0;      // power of mu

  bool operator<(const CoefficientTag& o) const {
    return std::tie(diffusion, component, column, order) < std::tie(o.diffusion, o.component, o.column, o.order);
  }
};

// dr, dphi = (a0(r) + a(r, phi, S(t), t)) dt + eps A(r, phi, S(t), t) dw with
// a = sum_j mu^j a_j and A = sum_j mu^j alpha_j.
class PerturbedSystem {
 public:
  PerturbedSystem(std::string name, DecayEnvelope env, PerturbationPhase phase, double epsilon);
  virtual ~PerturbedSystem() = default;

  const std::string& name() const { return name_; }
  const DecayEnvelope& envelope() const { return env_; }
  const PerturbationPhase& phase() const { return phase_; }
  const ResonanceData& resonance() const { return res_; }
  double epsilon() const { return epsilon_; }
  const std::map<std::string, double>& parameters() const { return params_; }

  virtual Chart simulation_chart() const { return Chart::Polar; }
  virtual double r_bound() const = 0;
  virtual double nu(double r) const = 0;
  // nu^{(q)}(r0)/q!, q = 0..q_max
  virtual Eigen::VectorXd nu_taylor(int q_max) const;

  virtual std::vector<int> drift_orders() const = 0;
  virtual std::vector<int> diffusion_orders() const = 0;
  virtual double coefficient(const CoefficientTag& tag, double r, double phi, double S) const = 0;
  // d_r^q c(r0, kappa S / varkappa + Psi, S) / q! as modes in (Psi, S).
  virtual TrigPoly taylor_coefficient(const CoefficientTag& tag, int q) const;

  Eigen::Vector2d polar_drift(double r, double phi, double t) const;
  Eigen::Matrix2d polar_diffusion(double r, double phi, double t) const;

  // Simulation chart; the polar chart is the default.
  virtual Eigen::Vector2d drift(const Eigen::Vector2d& x, double t) const;
  virtual Eigen::Matrix2d diffusion(const Eigen::Vector2d& x, double t) const;
  virtual ActionAngle to_polar(const Eigen::Vector2d& x) const;
  virtual Eigen::Vector2d from_polar(double r, double phi) const;
  // (x1, x2) for path output
  virtual Eigen::Vector2d cartesian(const Eigen::Vector2d& x) const = 0;
  // Orbit amplitude r of a chart state; +inf when the state left the well.
  virtual double amplitude(const Eigen::Vector2d& x) const { return std::abs(x(0)); }
  bool escaped(const Eigen::Vector2d& x) const { return !(amplitude(x) < 0.98 * r_bound()); }

  double S(double t) const { return phase_S(env_, phase_, t); }
  // Corrections s_k of S(t) = s0 t + sum_k s_k int mu^k.
  void set_phase_corrections(std::vector<double> s) { phase_.s = std::move(s); }
  double taylor_radius() const;

 protected:
  void set_resonance(int n, int p, int kappa, int varkappa, double r0, double eta);
  void check_state(double r) const;
  const std::vector<TrigPoly>& cached_taylor(const CoefficientTag& tag,
                                             const std::function<std::vector<TrigPoly>()>& compute) const;
  // N <= 4 and orders j >= 1 need r-derivatives up to q = N + 1 - 2.
  static constexpr int kTaylorDepth = 3;

  std::map<std::string, double> params_;

 private:
  std::string name_;
  DecayEnvelope env_;
  PerturbationPhase phase_;
  double epsilon_;
  ResonanceData res_;
  mutable std::mutex cache_mutex_;
  mutable std::map<CoefficientTag, std::vector<TrigPoly>> cache_;
};

// Fourier fit on an (phi, S) grid of Taylor coefficients in r at r0, orders 0..q_max.
std::vector<TrigPoly> fit_taylor_phi_S(const std::function<double(double, double, double)>& f, double r0,
                                       double delta, int q_max, int grid = 96);
// Same for functions of (r, phi) only.
std::vector<TrigPoly> fit_taylor_phi(const std::function<double(double, double)>& f, double r0, double delta,
                                     int q_max, int grid = 96);

struct Example1Params {
  double theta = 0.25;
  double Q0 = -0.00125, Q1 = 0.0;
  double Z0 = 0.0, Z1 = 0.0;
  double B0 = 0.0, B1 = 1.0;
  double s0 = 0.5;
  int p = 1;
  int kappa = 1;
  int varkappa = 1;
  double epsilon = 0.1;
};

// Example with nu(r) = 1 - theta r^2 and single-source noise in the polar chart.
class Example1System : public PerturbedSystem {
 public:
  explicit Example1System(const Example1Params& prm, DecayEnvelope env = DecayEnvelope::power_log(2.0));

  const Example1Params& params() const { return prm_; }
  double r_bound() const override { return 1.0 / std::sqrt(prm_.theta); }
  double nu(double r) const override { return 1.0 - prm_.theta * r * r; }
  Eigen::VectorXd nu_taylor(int q_max) const override;
  std::vector<int> drift_orders() const override;
  std::vector<int> diffusion_orders() const override { return {prm_.p}; }
  double coefficient(const CoefficientTag& tag, double r, double phi, double S) const override;
  TrigPoly taylor_coefficient(const CoefficientTag& tag, int q) const override;
  Eigen::Vector2d cartesian(const Eigen::Vector2d& x) const override;

 private:
  // Laurent expansion in r: exponent -> modes in (phi, S)
  std::map<int, TrigPoly> laurent(const CoefficientTag& tag) const;

  Example1Params prm_;
};

struct DuffingParams {
  double theta = 1.0 / 32.0;
  double P0 = 0.0, P1 = 1.0;
  double Q0 = -0.25, Q1 = 0.0;
  double B0 = 3.6, B1 = 0.0;
  double s0 = 1.5;
  int n = 2;
  int p = 1;
  int kappa = 1;
  int varkappa = 2;
  double epsilon = 0.1;
};

// Softening Duffing oscillator with x-linear forcing and additive noise in x2.
class DuffingSystem : public PerturbedSystem {
 public:
  explicit DuffingSystem(const DuffingParams& prm, DecayEnvelope env = DecayEnvelope::power(4.0));

  const DuffingParams& params() const { return prm_; }
  const DuffingOscillator& oscillator() const { return osc_; }
  Chart simulation_chart() const override { return Chart::Cartesian; }
  double r_bound() const override { return osc_.r_max(); }
  double nu(double r) const override { return osc_.frequency(r); }
  std::vector<int> drift_orders() const override;
  std::vector<int> diffusion_orders() const override { return {prm_.p}; }
  double coefficient(const CoefficientTag& tag, double r, double phi, double S) const override;
  TrigPoly taylor_coefficient(const CoefficientTag& tag, int q) const override;

  Eigen::Vector2d drift(const Eigen::Vector2d& x, double t) const override;
  Eigen::Matrix2d diffusion(const Eigen::Vector2d& x, double t) const override;
  ActionAngle to_polar(const Eigen::Vector2d& x) const override;
  Eigen::Vector2d from_polar(double r, double phi) const override;
  Eigen::Vector2d cartesian(const Eigen::Vector2d& x) const override { return x; }
  double amplitude(const Eigen::Vector2d& x) const override;

  // Second derivative of the angle along x2 at fixed x1.
  double angle_hessian_x2(double r, double phi) const;

  // Orbit point with r-derivatives at fixed phi.
  struct OrbitPoint {
    double r, x1, x2, x1r, x2r, x1rr, nu, nu_r;
  };
  static double angle_hessian_x2(const OrbitPoint& o);

 private:
  // Orbit sampled on Chebyshev nodes in r times a uniform phi grid; r-derivatives are spectral.
  void build_orbit_grid();

  std::vector<OrbitPoint> orbit_grid_;  // node i, phi index m -> i * kGrid + m
  static constexpr int kNodes = 24;
  static constexpr int kGrid = 96;

  double P(double S) const { return prm_.P0 + prm_.P1 * std::sin(S); }
  double Q(double S) const { return prm_.Q0 + prm_.Q1 * std::sin(S); }
  double B(double S) const { return prm_.B0 + prm_.B1 * std::sin(S); }

  DuffingParams prm_;
  DuffingOscillator osc_;
};

}  // namespace resonance
