#include "resonance/envelope.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <cmath>
#include <string>

#include "resonance/errors.hpp"

namespace resonance {

namespace {

void check_time(const DecayEnvelope& env, double t) {
  if (!(t >= env.tau0) || !std::isfinite(t)) {
    throw DomainError("envelope evaluated at t=" + std::to_string(t) + " below tau0=" + std::to_string(env.tau0));
  }
}

double integrate_log_variable(const std::function<double(double)>& g, double a, double b) {
  using boost::math::quadrature::gauss_kronrod;
  double err = 0.0;
  const double v = gauss_kronrod<double, 61>::integrate(g, a, b, 20, 1e-13, &err);
  if (!std::isfinite(v)) throw NumericalFailure("zeta quadrature produced a non-finite value");
  return v;
}

}  // namespace

DecayEnvelope DecayEnvelope::power(double q, double tau0) {
  if (!(q > 0.0)) throw DomainError("power envelope needs q > 0");
  if (!(tau0 > 0.0)) throw DomainError("power envelope needs tau0 > 0");
  DecayEnvelope env;
  env.kind = EnvelopeKind::Power;
  env.q = q;
  env.tau0 = tau0;
  return env;
}

DecayEnvelope DecayEnvelope::power_log(double q, double tau0) {
  if (!(q > 0.0)) throw DomainError("power-log envelope needs q > 0");
  const double lower = std::exp(q) + 1.0;
  if (tau0 <= 0.0) tau0 = lower;
  if (tau0 < lower) {
    throw DomainError("power-log envelope needs tau0 >= e^q + 1 = " + std::to_string(lower));
  }
  DecayEnvelope env;
  env.kind = EnvelopeKind::PowerLog;
  env.q = q;
  env.tau0 = tau0;
  return env;
}

DecayEnvelope DecayEnvelope::custom(std::function<double(double)> mu, std::function<double(double)> ell, double m,
                                    double chi_m, double tau0) {
  DecayEnvelope env;
  env.kind = EnvelopeKind::Custom;
  env.mu_fn = std::move(mu);
  env.ell_fn = std::move(ell);
  env.m_custom = m;
  env.chi_custom = chi_m;
  env.tau0 = tau0;
  double prev = env.mu_fn(tau0);
  if (!(prev > 0.0)) throw DomainError("custom envelope must be positive");
  for (double t = tau0 * 2.0; t < 1e12; t *= 2.0) {
    const double v = env.mu_fn(t);
    if (!(v > 0.0) || v > prev) throw DomainError("custom envelope must be positive and non-increasing");
    prev = v;
  }
  return env;
}

double DecayEnvelope::mu(double t) const {
  check_time(*this, t);
  switch (kind) {
    case EnvelopeKind::Power:
      return std::pow(t, -1.0 / q);
    case EnvelopeKind::PowerLog:
      return std::pow(t, -1.0 / q) * std::log(t);
    case EnvelopeKind::Custom:
      return mu_fn(t);
  }
  return 0.0;
}

double DecayEnvelope::ell(double t) const {
  check_time(*this, t);
  switch (kind) {
    case EnvelopeKind::Power:
      return -1.0 / (q * t);
    case EnvelopeKind::PowerLog:
      return -(1.0 - q / std::log(t)) / (q * t);
    case EnvelopeKind::Custom:
      return ell_fn(t);
  }
  return 0.0;
}

EnvelopeValue envelope_eval(const DecayEnvelope& env, double t) { return {env.mu(t), env.ell(t)}; }

MuExponents mu_exponents(const DecayEnvelope& env) {
  switch (env.kind) {
    case EnvelopeKind::Power:
      return {env.q, -1.0 / env.q};
    case EnvelopeKind::PowerLog:
      return {env.q, 0.0};
    case EnvelopeKind::Custom:
      return {env.m_custom, env.chi_custom};
  }
  return {0.0, 0.0};
}

bool zeta_divergent(const DecayEnvelope& env, double h) {
  if (h < 0.0) throw DomainError("zeta order must be non-negative");
  switch (env.kind) {
    case EnvelopeKind::Power:
    case EnvelopeKind::PowerLog:
      return h / (2.0 * env.q) <= 1.0;
    case EnvelopeKind::Custom: {
      const double t = 1e12;
      const double rate = -t * env.ell_fn(t);
      return h * rate / 2.0 <= 1.0 + 1e-6;
    }
  }
  return true;
}

ZetaValue zeta(const DecayEnvelope& env, double h, double t0, double t) {
  if (h < 0.0) throw DomainError("zeta order must be non-negative");
  check_time(env, t0);
  check_time(env, t);
  if (t < t0) throw DomainError("zeta needs t >= t0");
  const bool divergent = zeta_divergent(env, h);
  if (t == t0) return {0.0, divergent};
  if (h == 0.0) return {t - t0, divergent};
  switch (env.kind) {
    case EnvelopeKind::Power: {
      const double e = 1.0 - h / (2.0 * env.q);
      if (std::abs(e) < 1e-14) return {std::log(t / t0), divergent};
      return {(std::pow(t, e) - std::pow(t0, e)) / e, divergent};
    }
    case EnvelopeKind::PowerLog: {
      const double e = 1.0 - h / (2.0 * env.q);
      const double hh = h / 2.0;
      auto g = [e, hh](double x) { return std::exp(e * x) * std::pow(x, hh); };
      return {integrate_log_variable(g, std::log(t0), std::log(t)), divergent};
    }
    case EnvelopeKind::Custom: {
      auto g = [&env, h](double x) {
        const double s = std::exp(x);
        return std::pow(env.mu_fn(s), h / 2.0) * s;
      };
      return {integrate_log_variable(g, std::log(t0), std::log(t)), divergent};
    }
  }
  return {0.0, divergent};
}

double phase_S(const DecayEnvelope& env, const PerturbationPhase& phase, double t) {
  double S = phase.s0 * t;
  for (std::size_t k = 1; k <= phase.s.size(); ++k) {
    if (phase.s[k - 1] != 0.0) S += phase.s[k - 1] * zeta(env, 2.0 * static_cast<double>(k), phase.t0, t).value;
  }
  return S;
}

double phase_rate(const DecayEnvelope& env, const PerturbationPhase& phase, double t) {
  double rate = phase.s0;
  if (phase.s.empty()) return rate;
  const double mu = env.mu(t);
  double mk = 1.0;
  for (double sk : phase.s) {
    mk *= mu;
    rate += sk * mk;
  }
  return rate;
}

}  // namespace resonance
