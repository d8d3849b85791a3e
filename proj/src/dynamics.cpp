#include "resonance/dynamics.hpp"

#include <boost/math/tools/roots.hpp>
#include <cmath>
#include <numbers>

#include "resonance/errors.hpp"

namespace resonance {

namespace {

constexpr int kScan = 1024;
constexpr double kXiTol = 1e-10;
constexpr double kDivergenceTol = 1e-12;

double wrap_angle(double a) {
  a = std::fmod(a, 2.0 * std::numbers::pi);
  if (a < 0.0) a += 2.0 * std::numbers::pi;
  return a;
}

// Truncated power series in s with real coefficients.
using Series = Eigen::VectorXd;

Series series_mul(const Series& a, const Series& b) {
  const Eigen::Index n = a.size();
  Series c = Series::Zero(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    if (a(i) == 0.0) continue;
    for (Eigen::Index j = 0; i + j < n; ++j) c(i + j) += a(i) * b(j);
  }
  return c;
}

// exp(i m x(s)) as complex series, x(0) = 0.
Eigen::VectorXcd series_cis(const Series& x, double m) {
  const Eigen::Index n = x.size();
  Eigen::VectorXcd e = Eigen::VectorXcd::Zero(n);
  e(0) = 1.0;
  // e' = i m x' e
  for (Eigen::Index k = 1; k < n; ++k) {
    std::complex<double> acc = 0.0;
    for (Eigen::Index j = 1; j <= k; ++j) acc += static_cast<double>(j) * x(j) * e(k - j);
    e(k) = std::complex<double>(0.0, m) * acc / static_cast<double>(k);
  }
  return e;
}

// f(rho(s), psi0 + dpsi(s)) for a psi-only TrigPoly with polynomial rho dependence.
Series compose(const TrigPoly& f, const Series& rho, const Series& dpsi, double psi0) {
  const Eigen::Index n = rho.size();
  Eigen::VectorXcd out = Eigen::VectorXcd::Zero(n);
  for (const auto& [key, p] : f.modes()) {
    Eigen::VectorXcd poly = Eigen::VectorXcd::Zero(n);
    Series pw = Series::Zero(n);
    pw(0) = 1.0;
    for (Eigen::Index i = 0; i < p.size(); ++i) {
      poly += p(i) * pw.cast<std::complex<double>>();
      pw = series_mul(pw, rho);
    }
    const Eigen::VectorXcd e = series_cis(dpsi, key.first);
    const std::complex<double> base = std::polar(1.0, key.first * psi0);
    for (Eigen::Index i = 0; i < n; ++i) {
      std::complex<double> acc = 0.0;
      for (Eigen::Index j = 0; j <= i; ++j) acc += poly(j) * e(i - j);
      out(i) += base * acc;
    }
  }
  return out.real();
}

// Series of sum_j s^j F_j(rho(s), psi(s)).
Series field_series(const std::vector<TrigPoly>& F, const Series& rho, const Series& dpsi, double psi0) {
  const Eigen::Index n = rho.size();
  Series total = Series::Zero(n);
  for (std::size_t j = 1; j < F.size(); ++j) {
    if (static_cast<Eigen::Index>(j) >= n) break;
    if (F[j].empty()) continue;
    const Series c = compose(F[j], rho, dpsi, psi0);
    total.tail(n - j) += c.head(n - j);
  }
  return total;
}

}  // namespace

std::string to_string(Regime r) {
  switch (r) {
    case Regime::PhaseLocking:
      return "PhaseLocking";
    case Regime::PhaseDrift:
      return "PhaseDrift";
    case Regime::Degenerate:
      return "Degenerate";
    case Regime::UnstableSaddle:
      return "UnstableSaddle";
    case Regime::Indeterminate:
      return "Indeterminate";
  }
  return "Indeterminate";
}

std::string to_string(HorizonKind h) { return h == HorizonKind::Infinite ? "Infinite" : "TEpsilon"; }

EquilibriumSet find_equilibria(const AveragedSystem& avg) {
  const TrigPoly& lam = avg.lambda();
  const TrigPoly dlam = lam.d_Psi();
  auto f = [&lam](double psi) { return lam.evaluate(0.0, psi, 0.0); };
  EquilibriumSet out;
  const double scale = lam.max_abs_coefficient();
  if (scale <= kDivergenceTol) {
    out.degenerate = true;
    return out;
  }
  const double h = 2.0 * std::numbers::pi / kScan;
  std::vector<double> vals(kScan + 1);
  for (int i = 0; i <= kScan; ++i) vals[i] = f(i * h);
  out.min_abs_lambda = std::abs(vals[0]);
  for (int i = 0; i < kScan; ++i) out.min_abs_lambda = std::min(out.min_abs_lambda, std::abs(vals[i]));

  auto tol = [](double a, double b) { return std::abs(b - a) <= 1e-13; };
  for (int i = 0; i < kScan; ++i) {
    const double a = i * h, b = (i + 1) * h;
    double root;
    if (vals[i] == 0.0) {
      root = a;
    } else if (vals[i] * vals[i + 1] < 0.0) {
      const auto br = boost::math::tools::bisect(f, a, b, tol);
      root = 0.5 * (br.first + br.second);
    } else {
      continue;
    }
    const double xi = dlam.evaluate(0.0, root, 0.0);
    if (std::abs(xi) < kXiTol) out.degenerate = true;
    out.roots.push_back({wrap_angle(root), xi, xi * avg.eta < 0.0});
  }
  if (out.roots.empty() && out.min_abs_lambda <= 1e-12 * std::max(1.0, scale)) out.degenerate = true;
  return out;
}

Dissipation dissipation_order(const AveragedSystem& avg, double psi0) {
  for (int k = 1; k <= avg.N; ++k) {
    TrigPoly div = avg.Lambda[k].d_R() + avg.Omega[k].d_Psi();
    if (div.max_abs_coefficient() <= kDivergenceTol) continue;
    if (k == 1) throw AssumptionViolated("divergence does not vanish at first order");
    Dissipation d;
    d.h = k;
    d.gamma_h = div.evaluate(0.0, psi0, 0.0);
    const double m = avg.exponents.m;
    const double chi = avg.exponents.chi_m;
    const bool corner = std::abs(k - 2.0 * m) < 1e-12;
    d.gamma_tilde_h = d.gamma_h - (corner ? chi * avg.n / 2.0 : 0.0);
    if (!corner || chi == 0.0) {
      d.z0 = 0.5;
    } else {
      d.z0 = 0.5 * std::min(1.0, d.gamma_tilde_h / chi);
    }
    return d;
  }
  throw AssumptionViolated("divergence of the averaged field vanishes up to order N; dissipation order not found");
}

RegimeReport classify(const AveragedSystem& avg) {
  RegimeReport rep;
  rep.eta = avg.eta;
  rep.equilibria = find_equilibria(avg);
  rep.zeta_2n1_divergent = zeta_divergent(avg.envelope, 2.0 * avg.n - 1.0);
  const int two_p_minus_n = 2 * avg.p - avg.n;
  rep.horizon = two_p_minus_n >= 0 && !zeta_divergent(avg.envelope, two_p_minus_n) ? HorizonKind::Infinite
                                                                                     : HorizonKind::TEpsilon;
  const bool orders_ok = avg.exponents.m >= avg.n && 2 * avg.p >= avg.n;

  if (rep.equilibria.degenerate) {
    rep.regime = Regime::Degenerate;
    rep.note = "xi vanishes at an equilibrium or lambda vanishes identically";
    return rep;
  }
  if (rep.equilibria.roots.empty()) {
    if (rep.zeta_2n1_divergent && avg.exponents.m >= avg.n) {
      rep.regime = Regime::PhaseDrift;
    } else {
      rep.regime = Regime::Indeterminate;
      rep.note = "lambda has no zeros but the drift integral converges";
    }
    return rep;
  }

  bool have_stable = false;
  for (const auto& e : rep.equilibria.roots) {
    if (!e.stable) continue;
    const Dissipation d = dissipation_order(avg, e.psi0);
    if (!have_stable) {
      have_stable = true;
      rep.psi0 = e.psi0;
      rep.xi = e.xi;
      rep.dissipation = d;
    }
    if (d.gamma_tilde_h < 0.0 && orders_ok) {
      rep.psi0 = e.psi0;
      rep.xi = e.xi;
      rep.dissipation = d;
      rep.zeta_h_divergent = zeta_divergent(avg.envelope, d.h);
      rep.regime = Regime::PhaseLocking;
      return rep;
    }
  }
  if (have_stable) rep.zeta_h_divergent = zeta_divergent(avg.envelope, rep.dissipation.h);
  rep.regime = Regime::UnstableSaddle;
  rep.note = have_stable ? "centre-type equilibria are not attracting (gamma_tilde_h >= 0 or order conditions fail)"
                         : "only saddle-type equilibria";
  return rep;
}

double ParticularSolution::rho_star(double mu) const {
  const double s = std::sqrt(mu);
  double v = 0.0, w = 1.0;
  for (int k = 1; k < H; ++k) {
    w *= s;
    v += rho_k[k] * w;
  }
  return v;
}

double ParticularSolution::psi_star(double mu) const {
  const double s = std::sqrt(mu);
  double v = psi0, w = 1.0;
  for (int k = 1; k < H; ++k) {
    w *= s;
    v += phi_k[k] * w;
  }
  return v;
}

ParticularSolution particular_solution(const AveragedSystem& avg, double psi0, double xi, int H) {
  if (avg.eta == 0.0 || xi == 0.0) throw SingularSystemError("particular solution needs xi * eta != 0");
  if (H < 1 || H > 4) throw UnsupportedOrderError("particular-solution order H must lie in [1, 4]");
  ParticularSolution ps;
  ps.H = H;
  ps.psi0 = psi0;
  ps.rho_k.assign(H, 0.0);
  ps.phi_k.assign(H, 0.0);
  const int lead = 2 * avg.n - 1;
  const int len = lead + H + 1;
  Series rho = Series::Zero(len), dpsi = Series::Zero(len);
  for (int k = 1; k < H; ++k) {
    const Series fo = field_series(avg.Omega, rho, dpsi, psi0);
    const Series fl = field_series(avg.Lambda, rho, dpsi, psi0);
    ps.rho_k[k] = -fo(k + 1) / avg.eta;
    ps.phi_k[k] = -fl(lead + k) / xi;
    rho(k) = ps.rho_k[k];
    dpsi(k) = ps.phi_k[k];
  }
  return ps;
}

bool in_domain(const AveragedSystem& avg, double rho, double t0, double eps) {
  const double isq = 1.0 / std::sqrt(avg.envelope.mu(t0));
  return std::abs(rho + avg.r0 * isq) <= avg.r_bound * isq - eps;
}

TruncatedPath integrate_truncated(const AveragedSystem& avg, const Eigen::Vector2d& init, double t0, double T,
                                  double dt, double domain_eps, int record_every, double grid_power) {
  if (!(dt > 0.0) || !(T >= t0)) throw DomainError("integrate_truncated needs dt > 0 and T >= t0");
  if (!in_domain(avg, init(0), t0, domain_eps)) throw DomainError("initial point outside the domain D");
  TruncatedPath path;
  Eigen::Vector2d x = init;
  double t = t0;
  path.t.push_back(t);
  path.state.push_back(x);
  auto F = [&avg](double tt, const Eigen::Vector2d& y) { return avg.field(y(0), y(1), tt); };
  const double mu0 = avg.envelope.mu(t0);
  long step = 0;
  while (t < T) {
    double h = dt;
    if (grid_power > 0.0) h = dt * std::pow(mu0 / avg.envelope.mu(t), grid_power);
    h = std::min(h, T - t);
    const Eigen::Vector2d k1 = F(t, x);
    const Eigen::Vector2d k2 = F(t + h / 2, x + h / 2 * k1);
    const Eigen::Vector2d k3 = F(t + h / 2, x + h / 2 * k2);
    const Eigen::Vector2d k4 = F(t + h, x + h * k3);
    x += h / 6 * (k1 + 2 * k2 + 2 * k3 + k4);
    t = (T - t <= h) ? T : t + h;
    ++step;
    if (!x.allFinite()) throw NumericalFailure("truncated system blew up at t = " + std::to_string(t));
    const bool inside = in_domain(avg, x(0), t0, domain_eps);
    if (step % record_every == 0 || t >= T || !inside) {
      path.t.push_back(t);
      path.state.push_back(x);
    }
    if (!inside) {
      path.left_domain = true;
      path.exit_time = t;
      break;
    }
  }
  return path;
}

Eigen::Vector2cd limiting_eigenvalues(const AveragedSystem& avg, double psi0, double t) {
  const double mu = avg.envelope.mu(t);
  Eigen::Matrix2d J = Eigen::Matrix2d::Zero();
  J(0, 1) = std::pow(mu, (2.0 * avg.n - 1.0) / 2.0) * avg.lambda().d_Psi().evaluate(0.0, psi0, 0.0);
  J(1, 0) = std::sqrt(mu) * avg.Omega[1].d_R().evaluate(0.0, psi0, 0.0);
  return Eigen::EigenSolver<Eigen::Matrix2d>(J).eigenvalues();
}

}  // namespace resonance
