#pragma once

#include <functional>
#include <vector>

namespace resonance {

enum class EnvelopeKind { Power, PowerLog, Custom };

// Decay envelope mu(t) with logarithmic derivative ell(t) = mu'(t) / mu(t).
struct DecayEnvelope {
  EnvelopeKind kind = EnvelopeKind::Power;
  double q = 4.0;
  double tau0 = 1.0;
  std::function<double(double)> mu_fn;
  std::function<double(double)> ell_fn;
  double m_custom = 0.0;
  double chi_custom = 0.0;

  static DecayEnvelope power(double q, double tau0 = 1.0);
  // tau0 <= 0 selects the smallest admissible start e^q + 1.
  static DecayEnvelope power_log(double q, double tau0 = 0.0);
  static DecayEnvelope custom(std::function<double(double)> mu, std::function<double(double)> ell,
                              double m, double chi_m, double tau0);

  double mu(double t) const;
  double ell(double t) const;
};

struct EnvelopeValue {
  double mu;
  double ell;
};

struct MuExponents {
  double m;
  double chi_m;
};

struct ZetaValue {
  double value;
  bool divergent;
};

EnvelopeValue envelope_eval(const DecayEnvelope& env, double t);
MuExponents mu_exponents(const DecayEnvelope& env);

// True when the integral of mu^{h/2} over [tau0, inf) diverges.
bool zeta_divergent(const DecayEnvelope& env, double h);
ZetaValue zeta(const DecayEnvelope& env, double h, double t0, double t);

// S(t) = s0 t + sum_k s_k int_{t0}^t mu^k.
struct PerturbationPhase {
  double s0 = 0.5;
  std::vector<double> s;  // s[k-1] multiplies mu^k
  double t0 = 1.0;

  double coefficient(int k) const { return k >= 1 && k <= static_cast<int>(s.size()) ? s[k - 1] : 0.0; }
};

double phase_S(const DecayEnvelope& env, const PerturbationPhase& phase, double t);
double phase_rate(const DecayEnvelope& env, const PerturbationPhase& phase, double t);

}  // namespace resonance
