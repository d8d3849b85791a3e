#pragma once

#include <Eigen/Dense>
#include <limits>
#include <string>
#include <vector>

#include "resonance/averaging.hpp"

namespace resonance {

enum class Regime { PhaseLocking, PhaseDrift, Degenerate, UnstableSaddle, Indeterminate };
enum class HorizonKind { Infinite, TEpsilon };

std::string to_string(Regime r);
std::string to_string(HorizonKind h);

struct Equilibrium {
  double psi0;
  double xi;
  bool stable;  // xi * eta < 0 (centre of the limiting system)
};

struct EquilibriumSet {
  std::vector<Equilibrium> roots;
  bool degenerate = false;  // |xi| < 1e-10 at a root, or lambda vanishes identically
  double min_abs_lambda = 0.0;
};

struct Dissipation {
  int h = 0;
  double gamma_h = 0.0;
  double gamma_tilde_h = 0.0;
  double z0 = 0.0;
};

struct RegimeReport {
  Regime regime = Regime::Indeterminate;
  EquilibriumSet equilibria;
  double psi0 = std::numeric_limits<double>::quiet_NaN();
  double xi = std::numeric_limits<double>::quiet_NaN();
  double eta = 0.0;
  Dissipation dissipation;
  bool zeta_h_divergent = false;
  bool zeta_2n1_divergent = false;
  HorizonKind horizon = HorizonKind::TEpsilon;
  std::string note;
};

struct ParticularSolution {
  int H = 1;
  double psi0 = 0.0;
  std::vector<double> rho_k;  // index k = 1..H-1, entry 0 unused
  std::vector<double> phi_k;

  double rho_star(double mu) const;
  double psi_star(double mu) const;
};

struct TruncatedPath {
  std::vector<double> t;
  std::vector<Eigen::Vector2d> state;
  bool left_domain = false;
  double exit_time = std::numeric_limits<double>::quiet_NaN();
};

EquilibriumSet find_equilibria(const AveragedSystem& avg);
Dissipation dissipation_order(const AveragedSystem& avg, double psi0);
RegimeReport classify(const AveragedSystem& avg);
ParticularSolution particular_solution(const AveragedSystem& avg, double psi0, double xi, int H);

// Boundary of D_{eps, t0}: |rho + r0 mu^{-1/2}(t0)| <= R mu^{-1/2}(t0) - eps.
bool in_domain(const AveragedSystem& avg, double rho, double t0, double eps);

// Classic RK4 on a fixed grid for d(rho, psi)/dt = avg.field. grid_power > 0 stretches
// the step as dt * (mu(t0)/mu(t))^{grid_power}.
TruncatedPath integrate_truncated(const AveragedSystem& avg, const Eigen::Vector2d& init, double t0, double T,
                                  double dt, double domain_eps = 0.0, int record_every = 1, double grid_power = 0.0);

// Eigenvalues of the frozen-time limiting system at (0, psi0).
Eigen::Vector2cd limiting_eigenvalues(const AveragedSystem& avg, double psi0, double t);

}  // namespace resonance
