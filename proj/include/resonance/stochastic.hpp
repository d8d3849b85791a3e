#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <cstdint>
#include <limits>
#include <ostream>
#include <vector>

#include "resonance/averaging.hpp"
#include "resonance/dynamics.hpp"
#include "resonance/errors.hpp"
#include "resonance/noise.hpp"
#include "resonance/systems.hpp"

namespace resonance {

// Fixed-step Euler-Maruyama on t_i = t0 + i dt (the last step is shortened to land on t1).
// drift(x, t) -> Vector2d, diffusion(x, t) -> Matrix2d, dW(step, h) -> Vector2d,
// stop(x, t) -> bool ends the run early, observe(step, t, x) is called on every grid point.
// Returns the time reached.
template <typename Drift, typename Diffusion, typename Increment, typename Stop, typename Observe>
double euler_maruyama(Eigen::Vector2d& x, double t0, double t1, double dt, Drift&& drift, Diffusion&& diffusion,
                      Increment&& dW, Stop&& stop, Observe&& observe) {
  if (!(dt > 0.0)) throw DomainError("euler_maruyama: dt must be positive");
  const auto steps = static_cast<std::uint64_t>(std::ceil((t1 - t0) / dt - 1e-9));
  double t = t0;
  observe(std::uint64_t{0}, t, x);
  for (std::uint64_t i = 0; i < steps; ++i) {
    if (stop(x, t)) return t;
    const double t_next = i + 1 == steps ? t1 : t0 + static_cast<double>(i + 1) * dt;
    const double h = t_next - t;
    const Eigen::Vector2d inc = dW(i, h);
    x += drift(x, t) * h + diffusion(x, t) * inc;
    if (!x.allFinite()) throw NumericalFailure("euler_maruyama: non-finite state");
    t = t_next;
    observe(i + 1, t, x);
  }
  return t;
}

struct SamplePath {
  std::vector<double> t;
  std::vector<Eigen::Vector2d> state;  // simulation chart
  std::vector<double> r;
  std::vector<double> phi;
  std::vector<double> psi;  // phi - kappa S / varkappa, unwrapped
  bool escaped = false;
  double escape_time = std::numeric_limits<double>::quiet_NaN();
};

SamplePath integrate_sde(const PerturbedSystem& sys, const Eigen::Vector2d& init, double t0, double T, double dt,
                         const NoiseStream& stream, int record_every = 1);

double resonance_metric(const AveragedSystem& avg, const ParticularSolution& ps, double rho, double psi, double t);

struct Horizon {
  HorizonKind kind = HorizonKind::TEpsilon;
  double value = std::numeric_limits<double>::infinity();
};

// Root of zeta_{2p-n}(t_star + T) - zeta_{2p-n}(t_star) = eps^{-2(1-l)}.
Horizon t_epsilon(const DecayEnvelope& env, int p, int n, double eps, double l, double t_star);

struct CaptureOptions {
  int n_paths = 200;
  double delta1 = 0.2;
  double eps2 = 1.0;
  double t_star = 1.0;
  Horizon horizon;
  double t_max = 1e4;  // used when the horizon is infinite
  double dt = 0.0;     // <= 0 selects 1e-3 * 2 pi / s0
  std::uint64_t seed = 1;
  unsigned workers = 0;  // 0 -> hardware concurrency
  bool boundary = false;
  bool near_identity = false;
  int monitor_every = 10;
  bool stop_on_exit = true;  // stop a path once M >= eps2
  bool keep_paths = false;
  int record_every = 100;
};

struct PathOutcome {
  bool captured = false;
  bool escaped = false;
  double sup_metric = 0.0;
  double exit_time = std::numeric_limits<double>::quiet_NaN();   // first time M >= eps2
  double escape_time = std::numeric_limits<double>::quiet_NaN();
};

struct PathRecord {
  std::vector<double> t;
  std::vector<Eigen::Vector2d> xy;
  std::vector<double> r, phi, psi, metric;
};

struct CaptureStats {
  int n_paths = 0;
  int n_captured = 0;
  double p_hat = 0.0;
  double ci_low = 0.0;
  double ci_high = 1.0;
  double delta1 = 0.0;
  double eps2 = 0.0;
  double horizon = 0.0;
  bool horizon_clamped = false;
  std::uint64_t seed = 0;
  std::vector<PathOutcome> outcomes;
  std::vector<PathRecord> paths;
};

std::pair<double, double> wilson_interval(int successes, int trials, double z = 1.959963984540054);

CaptureStats capture_probability(const PerturbedSystem& sys, const AveragedSystem& avg, const ParticularSolution& ps,
                                 const CaptureOptions& opt);

// M is written as nan unless avg and ps are given.
void write_path_csv(std::ostream& os, const SamplePath& path, const PerturbedSystem& sys,
                    const AveragedSystem* avg = nullptr, const ParticularSolution* ps = nullptr);
void write_capture_paths_csv(std::ostream& os, const CaptureStats& stats);

}  // namespace resonance
