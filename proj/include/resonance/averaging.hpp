#pragma once

#include <Eigen/Dense>
#include <vector>

#include "resonance/envelope.hpp"
#include "resonance/systems.hpp"
#include "resonance/trigpoly.hpp"

namespace resonance {

// Near-resonant normal form: d rho = Lambda dt + ..., d psi = Omega dt + ...,
// with Lambda = sum_k mu^{k/2} Lambda_k(rho, psi) - ell rho / 2 and Omega = sum_k mu^{k/2} Omega_k(rho, psi).
struct AveragedSystem {
  int N = 4;
  int n = 2;
  int p = 1;
  int kappa = 1;
  int varkappa = 1;
  double s0 = 0.0;
  double r0 = 0.0;
  double eta = 0.0;
  double epsilon = 0.0;
  double r_bound = 0.0;
  DecayEnvelope envelope;
  PerturbationPhase phase;
  MuExponents exponents{};
  std::vector<TrigPoly> Lambda;  // index k = 1..N, entry 0 unused
  std::vector<TrigPoly> Omega;
  std::vector<TrigPoly> u;
  std::vector<TrigPoly> v;

  // lambda(psi) = Lambda_{2n-1}, independent of rho.
  const TrigPoly& lambda() const { return Lambda.at(2 * n - 1); }
  Eigen::Vector2d field(double rho, double psi, double t) const;
  // (rho, psi) = (R + sum u_k mu^{k/2}, Psi + sum v_k mu^{k/2})
  Eigen::Vector2d near_identity(double R, double Psi, double S, double t) const;
  Eigen::Vector2d near_identity_inverse(double rho, double psi, double S, double t) const;
};

AveragedSystem build_averaged(const PerturbedSystem& sys, int N);

// Drift of (rho, psi) obtained by pushing the exact drift of sys through the change of variables,
// minus the truncated averaged field. Evaluated at the point (rho, psi) and phase S(t).
Eigen::Vector2d averaging_residual(const PerturbedSystem& sys, const AveragedSystem& avg, double rho, double psi,
                                   double t);

// Earliest t on a doubling grid where sum_k mu^{k/2}(t) sup |(u_k, v_k)| over |R| <= rho_max is below eps_box.
double near_identity_start(const AveragedSystem& avg, double eps_box, double rho_max);
double generator_bound(const AveragedSystem& avg, double t, double rho_max);

}  // namespace resonance
