#include "resonance/averaging.hpp"

#include <array>
#include <cmath>
#include <numbers>

#include "resonance/errors.hpp"

namespace resonance {

namespace {

using Series = std::vector<TrigPoly>;  // coefficient of s^m, s = mu^{1/2}
using Mat2 = std::array<std::array<TrigPoly, 2>, 2>;

double factorial(int k) {
  double f = 1.0;
  for (int i = 2; i <= k; ++i) f *= i;
  return f;
}

Series series_multiply(const Series& a, const Series& b, int max_order, int varkappa) {
  Series out(max_order + 1, TrigPoly(varkappa));
  for (int i = 0; i <= max_order && i < static_cast<int>(a.size()); ++i) {
    if (a[i].empty()) continue;
    for (int j = 0; i + j <= max_order && j < static_cast<int>(b.size()); ++j) {
      if (b[j].empty()) continue;
      out[i + j] += a[i] * b[j];
    }
  }
  return out;
}

Series series_power(const Series& x, int power, int max_order, int varkappa) {
  Series out(max_order + 1, TrigPoly(varkappa));
  out[0] = TrigPoly::constant(1.0, varkappa);
  for (int i = 0; i < power; ++i) out = series_multiply(out, x, max_order, varkappa);
  return out;
}

TrigPoly apply_derivatives(const TrigPoly& f, int a, int b) {
  TrigPoly g = f;
  for (int i = 0; i < a; ++i) g = g.d_R();
  for (int i = 0; i < b; ++i) g = g.d_Psi();
  return g;
}

}  // namespace

Eigen::Vector2d AveragedSystem::field(double rho, double psi, double t) const {
  const auto ev = envelope_eval(envelope, t);
  const double sq = std::sqrt(ev.mu);
  double w = 1.0;
  Eigen::Vector2d f(-0.5 * ev.ell * rho, 0.0);
  for (int k = 1; k <= N; ++k) {
    w *= sq;
    f(0) += w * Lambda[k].evaluate(rho, psi, 0.0);
    f(1) += w * Omega[k].evaluate(rho, psi, 0.0);
  }
  return f;
}

Eigen::Vector2d AveragedSystem::near_identity(double R, double Psi, double S, double t) const {
  const double sq = std::sqrt(envelope.mu(t));
  double w = 1.0;
  Eigen::Vector2d out(R, Psi);
  for (int k = 1; k <= N; ++k) {
    w *= sq;
    out(0) += w * u[k].evaluate(R, Psi, S);
    out(1) += w * v[k].evaluate(R, Psi, S);
  }
  return out;
}

Eigen::Vector2d AveragedSystem::near_identity_inverse(double rho, double psi, double S, double t) const {
  Eigen::Vector2d x(rho, psi);
  const Eigen::Vector2d target(rho, psi);
  for (int it = 0; it < 100; ++it) {
    const Eigen::Vector2d y = near_identity(x(0), x(1), S, t);
    const Eigen::Vector2d step = target - y;
    x += step;
    if (step.norm() < 1e-14 * (1.0 + target.norm())) return x;
  }
  throw NumericalFailure("near-identity inverse did not converge");
}

AveragedSystem build_averaged(const PerturbedSystem& sys, int N) {
  const ResonanceData& res = sys.resonance();
  const int n = res.n;
  if (N < 2 * n - 1 || N > 4) {
    throw UnsupportedOrderError("averaging order N must lie in [2n-1, 4], got " + std::to_string(N));
  }
  const MuExponents ex = mu_exponents(sys.envelope());
  if (N > 2.0 * ex.m + 1e-12) throw AssumptionViolated("averaging order N exceeds 2m for this envelope");

  const int vk = res.varkappa;
  const double s0 = sys.phase().s0;
  const double ratio = static_cast<double>(res.kappa) / res.varkappa;
  if (std::abs(res.kappa * s0 - res.varkappa * sys.nu(res.r0)) > 1e-10) {
    throw NoResonanceError("resonance condition violated at r0");
  }
  const double eps2 = sys.epsilon() * sys.epsilon();

  auto zero = [vk] { return TrigPoly(vk); };
  auto Rpow = [vk](int q) { return TrigPoly::monomial(1.0, q, vk); };

  // b_k and beta_k
  const Eigen::VectorXd nu_t = sys.nu_taylor(N);
  std::vector<TrigPair> b(N + 1, {zero(), zero()});
  std::vector<Mat2> beta(N + 1, Mat2{{{zero(), zero()}, {zero(), zero()}}});
  for (int k = 1; k <= N; ++k) {
    b[k][1] += nu_t(k) * Rpow(k);
    if (k % 2 == 0) b[k][1] += TrigPoly::constant(-ratio * sys.phase().coefficient(k / 2), vk);
    for (int j : sys.drift_orders()) {
      for (int i = 0; i < 2; ++i) {
        const int q = k + (i == 0 ? 1 : 0) - 2 * j;
        if (q < 0) continue;
        b[k][i] += sys.taylor_coefficient({false, i, 0, j}, q) * Rpow(q);
      }
    }
    if (eps2 == 0.0) continue;
    for (int j : sys.diffusion_orders()) {
      for (int i = 0; i < 2; ++i) {
        const int q = k + (i == 0 ? 1 : 0) - 2 * j;
        if (q < 0) continue;
        for (int c = 0; c < 2; ++c) beta[k][i][c] += sys.taylor_coefficient({true, i, c, j}, q) * Rpow(q);
      }
    }
  }

  AveragedSystem avg;
  avg.N = N;
  avg.n = n;
  avg.p = res.p;
  avg.kappa = res.kappa;
  avg.varkappa = vk;
  avg.s0 = s0;
  avg.r0 = res.r0;
  avg.eta = res.eta;
  avg.epsilon = sys.epsilon();
  avg.r_bound = sys.r_bound();
  avg.envelope = sys.envelope();
  avg.phase = sys.phase();
  avg.exponents = ex;
  avg.Lambda.assign(N + 1, zero());
  avg.Omega.assign(N + 1, zero());
  avg.u.assign(N + 1, zero());
  avg.v.assign(N + 1, zero());

  for (int k = 1; k <= N; ++k) {
    TrigPair g = b[k];

    // cross terms of the generator with lower-order corrections
    for (int j = 1; j < k; ++j) {
      const TrigPoly* w[2] = {&avg.u[k - j], &avg.v[k - j]};
      const double sj = j % 2 == 0 ? sys.phase().coefficient(j / 2) : 0.0;
      for (int i = 0; i < 2; ++i) {
        if (w[i]->empty()) continue;
        g[i] += b[j][0] * w[i]->d_R() + b[j][1] * w[i]->d_Psi();
        if (sj != 0.0) g[i] += sj * w[i]->d_S();
      }
    }

    // second-order (Ito) terms
    if (eps2 != 0.0) {
      for (int l = 1; l < k; ++l) {
        const TrigPoly* w[2] = {&avg.u[l], &avg.v[l]};
        for (int comp = 0; comp < 2; ++comp) {
          if (w[comp]->empty()) continue;
          Mat2 H;
          H[0][0] = w[comp]->d_R().d_R();
          H[0][1] = w[comp]->d_R().d_Psi();
          H[1][0] = H[0][1];
          H[1][1] = w[comp]->d_Psi().d_Psi();
          for (int i = 1; i + l < k; ++i) {
            const int j = k - l - i;
            for (int c = 0; c < 2; ++c) {
              for (int a = 0; a < 2; ++a) {
                if (beta[i][a][c].empty()) continue;
                for (int bb = 0; bb < 2; ++bb) {
                  if (beta[j][bb][c].empty() || H[a][bb].empty()) continue;
                  g[comp] += (0.5 * eps2) * (beta[i][a][c] * H[a][bb] * beta[j][bb][c]);
                }
              }
            }
          }
        }
      }
    }

    // Taylor composition of lower-order averaged terms
    if (k >= 2) {
      Series dR(k, zero()), dPsi(k, zero());
      for (int i = 1; i < k; ++i) {
        dR[i] = avg.u[i];
        dPsi[i] = avg.v[i];
      }
      for (int j = 1; j < k; ++j) {
        const int m = k - j;
        for (int a = 0; a <= m; ++a) {
          for (int bb = 0; a + bb <= m; ++bb) {
            if (a + bb == 0) continue;
            const Series pw = series_multiply(series_power(dR, a, m, vk), series_power(dPsi, bb, m, vk), m, vk);
            if (pw[m].empty()) continue;
            const double c = 1.0 / (factorial(a) * factorial(bb));
            g[0] -= c * (apply_derivatives(avg.Lambda[j], a, bb) * pw[m]);
            g[1] -= c * (apply_derivatives(avg.Omega[j], a, bb) * pw[m]);
          }
        }
      }
    }

    for (int i = 0; i < 2; ++i) g[i].prune(1e-15);
    avg.Lambda[k] = g[0].average_S();
    avg.Omega[k] = g[1].average_S();
    avg.u[k] = (avg.Lambda[k] - g[0]).solve_homological(s0);
    avg.v[k] = (avg.Omega[k] - g[1]).solve_homological(s0);
  }
  return avg;
}

Eigen::Vector2d averaging_residual(const PerturbedSystem& sys, const AveragedSystem& avg, double rho, double psi,
                                   double t) {
  const auto ev = envelope_eval(sys.envelope(), t);
  const double S = sys.S(t);
  const double Sdot = phase_rate(sys.envelope(), sys.phase(), t);
  const Eigen::Vector2d RP = avg.near_identity_inverse(rho, psi, S, t);
  const double R = RP(0), Psi = RP(1);
  const double sq = std::sqrt(ev.mu);
  const double ratio = static_cast<double>(avg.kappa) / avg.varkappa;

  const double r = avg.r0 + sq * R;
  const double phi = ratio * S + Psi;
  const Eigen::Vector2d a = sys.polar_drift(r, phi, t);
  const Eigen::Matrix2d A = sys.polar_diffusion(r, phi, t);
  Eigen::Vector2d drift(a(0) / sq - 0.5 * ev.ell * R, a(1) - ratio * Sdot);
  Eigen::Matrix2d sigma = A;
  sigma.row(0) /= sq;

  Eigen::Vector2d out = drift;
  double w = 1.0;
  for (int k = 1; k <= avg.N; ++k) {
    w *= sq;
    const TrigPoly* gen[2] = {&avg.u[k], &avg.v[k]};
    for (int i = 0; i < 2; ++i) {
      const TrigPoly& f = *gen[i];
      if (f.empty()) continue;
      const double fR = f.d_R().evaluate(R, Psi, S);
      const double fP = f.d_Psi().evaluate(R, Psi, S);
      Eigen::Matrix2d H;
      H(0, 0) = f.d_R().d_R().evaluate(R, Psi, S);
      H(0, 1) = H(1, 0) = f.d_R().d_Psi().evaluate(R, Psi, S);
      H(1, 1) = f.d_Psi().d_Psi().evaluate(R, Psi, S);
      out(i) += w * (Sdot * f.d_S().evaluate(R, Psi, S) + 0.5 * k * ev.ell * f.evaluate(R, Psi, S) +
                     drift(0) * fR + drift(1) * fP + 0.5 * (sigma.transpose() * H * sigma).trace());
    }
  }
  return out - avg.field(rho, psi, t);
}

double generator_bound(const AveragedSystem& avg, double t, double rho_max) {
  const double sq = std::sqrt(avg.envelope.mu(t));
  double total = 0.0, w = 1.0;
  for (int k = 1; k <= avg.N; ++k) {
    w *= sq;
    double sup = 0.0;
    for (const TrigPoly* f : {&avg.u[k], &avg.v[k]}) {
      double bound = 0.0;
      for (const auto& [key, p] : f->modes()) {
        for (Eigen::Index i = 0; i < p.size(); ++i) bound += std::abs(p(i)) * std::pow(rho_max, static_cast<double>(i));
      }
      sup = std::max(sup, bound);
    }
    total += w * sup;
  }
  return total;
}

double near_identity_start(const AveragedSystem& avg, double eps_box, double rho_max) {
  double t = avg.envelope.tau0;
  for (int i = 0; i < 200; ++i) {
    if (generator_bound(avg, t, rho_max) <= eps_box) return t;
    t *= 2.0;
  }
  throw NumericalFailure("near-identity transform bound not reached");
}

}  // namespace resonance
