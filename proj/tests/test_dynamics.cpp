#include <doctest.h>

#include <cmath>
#include <numbers>

#include "resonance/averaging.hpp"
#include "resonance/dynamics.hpp"
#include "resonance/errors.hpp"
#include "resonance/systems.hpp"

using namespace resonance;

namespace {

constexpr double kPi = std::numbers::pi;

Example1Params fig11(double eps = 0.1) {
  Example1Params p;
  p.theta = 0.25;
  p.B0 = 0.0;
  p.B1 = 1.0;
  p.epsilon = eps;
  p.Q0 = -eps * eps / 8;
  return p;
}

AveragedSystem averaged(const Example1Params& p) { return build_averaged(Example1System(p), 4); }

double wrap_pi(double a) { return a - kPi * std::round(a / kPi); }

}  // namespace

TEST_SUITE("dynamics") {
  TEST_CASE("FigEx11 equilibria and dissipation") {
    const AveragedSystem avg = averaged(fig11());
    const EquilibriumSet eq = find_equilibria(avg);
    CHECK_FALSE(eq.degenerate);
    CHECK(eq.roots.size() == 4);
    for (const auto& e : eq.roots) {
      CHECK(std::abs(avg.lambda().evaluate(0.0, e.psi0, 0.0)) < 1e-14);
      CHECK(e.stable == (e.xi * avg.eta < 0.0));
      CHECK(std::abs(std::abs(wrap_pi(e.psi0 - kPi / 4)) - (e.stable ? 0.0 : kPi / 2)) < 1e-8);
    }
    const RegimeReport rep = classify(avg);
    CHECK(rep.regime == Regime::PhaseLocking);
    CHECK(std::abs(wrap_pi(rep.psi0 - kPi / 4)) < 1e-8);
    CHECK(rep.dissipation.h == 4);
    CHECK(rep.dissipation.gamma_tilde_h == doctest::Approx(-0.01 / 8).epsilon(1e-10));
    CHECK(rep.dissipation.z0 == doctest::Approx(0.5));
    CHECK(rep.horizon == HorizonKind::TEpsilon);
  }

  TEST_CASE("gamma_h formulas of Example 1") {
    for (double B0 : {0.0, 0.5, 1.0}) {
      for (double B1 : {0.5, 1.0}) {
        for (double eps : {0.1, 0.4}) {
          // Z1 = 0 with Q0 placed so that lambda has zeros
          Example1Params p = fig11(eps);
          p.B0 = B0;
          p.B1 = B1;
          p.Q0 = p.theta * eps * eps * (0.3 * B1 * B1 - 4 * B0 * B0 - 2 * B1 * B1) / 4;
          const AveragedSystem a0 = averaged(p);
          const EquilibriumSet e0 = find_equilibria(a0);
          REQUIRE_FALSE(e0.roots.empty());
          for (const auto& e : e0.roots) {
            const Dissipation d = dissipation_order(a0, e.psi0);
            CHECK(d.h == 4);
            CHECK(d.gamma_h == doctest::Approx(3 * p.Q0 + p.theta * eps * eps * (2 * B0 * B0 + B1 * B1)).epsilon(1e-10));
          }
          // Z1 != 0: on lambda = 0 the divergence reduces to Q0 + theta eps^2 B1^2 cos(2 psi0) / 2
          p.Z1 = 1.0;
          p.Q0 = -0.3;
          const AveragedSystem a1 = averaged(p);
          const EquilibriumSet e1 = find_equilibria(a1);
          REQUIRE_FALSE(e1.roots.empty());
          for (const auto& e : e1.roots) {
            const Dissipation d = dissipation_order(a1, e.psi0);
            CHECK(d.gamma_h ==
                  doctest::Approx(p.Q0 + 0.5 * p.theta * eps * eps * B1 * B1 * std::cos(2 * e.psi0)).epsilon(1e-10));
          }
          p.p = 2;
          const AveragedSystem a2 = averaged(p);
          const EquilibriumSet e2 = find_equilibria(a2);
          REQUIRE_FALSE(e2.roots.empty());
          const Dissipation d2 = dissipation_order(a2, e2.roots.front().psi0);
          CHECK(d2.h == 4);
          CHECK(d2.gamma_h == doctest::Approx(p.Q0).epsilon(1e-10));
          CHECK(d2.gamma_tilde_h == doctest::Approx(p.Q0).epsilon(1e-10));
        }
      }
    }
  }

  TEST_CASE("FigEx12 equilibrium") {
    Example1Params p = fig11(1e-6);
    p.B0 = 2.0;
    p.B1 = 0.0;
    p.Z1 = 1.0 / std::sqrt(8.0);
    p.Q0 = -0.126;
    const RegimeReport rep = classify(averaged(p));
    CHECK(rep.regime == Regime::PhaseLocking);
    CHECK(rep.psi0 == doctest::Approx(std::acos(-0.504)).epsilon(1e-8));
    CHECK(rep.xi == doctest::Approx(p.Z1 * std::sin(std::acos(-0.504)) / 2).epsilon(1e-8));
  }

  TEST_CASE("regime examples") {
    Example1Params drift = fig11();
    drift.Q0 = -2 * drift.theta * drift.epsilon * drift.epsilon;
    CHECK(classify(averaged(drift)).regime == Regime::PhaseDrift);

    Example1Params flat = fig11();
    flat.B1 = 0.0;
    flat.Q0 = 0.1;
    const AveragedSystem af = averaged(flat);
    CHECK(find_equilibria(af).roots.empty());
    CHECK(classify(af).regime == Regime::PhaseDrift);

    Example1Params p2 = fig11(0.0);
    p2.p = 2;
    p2.Z1 = 1.0;
    p2.Q0 = -0.3;
    const RegimeReport r2 = classify(averaged(p2));
    CHECK(r2.regime == Regime::PhaseLocking);
    CHECK(r2.psi0 == doctest::Approx(std::acos(-0.3 / std::sqrt(0.5))).epsilon(1e-9));
    CHECK(r2.horizon == HorizonKind::TEpsilon);

    Example1Params zero = fig11(0.0);
    zero.Q0 = 0.0;
    zero.B1 = 0.0;
    CHECK(classify(averaged(zero)).regime == Regime::Degenerate);
  }

  TEST_CASE("classification ignores 2 pi shifts of the equilibrium angle") {
    const AveragedSystem avg = averaged(fig11());
    const RegimeReport rep = classify(avg);
    const Dissipation a = dissipation_order(avg, rep.psi0);
    const Dissipation b = dissipation_order(avg, rep.psi0 + 2 * kPi);
    const Dissipation c = dissipation_order(avg, rep.psi0 - 4 * kPi);
    CHECK(a.gamma_h == doctest::Approx(b.gamma_h).epsilon(1e-12));
    CHECK(a.gamma_h == doctest::Approx(c.gamma_h).epsilon(1e-12));
    CHECK(a.h == b.h);
  }

  TEST_CASE("saddle and centre dichotomy") {
    for (const auto& p : {fig11(), fig11(0.5)}) {
      const AveragedSystem avg = averaged(p);
      for (const auto& e : find_equilibria(avg).roots) {
        const Eigen::Vector2cd ev = limiting_eigenvalues(avg, e.psi0, 100.0);
        if (e.xi * avg.eta > 0.0) {
          CHECK(std::abs(ev(0).imag()) < 1e-14);
          CHECK(ev(0).real() * ev(1).real() < 0.0);
        } else {
          CHECK(std::abs(ev(0).real()) < 1e-14);
          CHECK(std::abs(ev(0).imag()) > 0.0);
        }
      }
    }
  }

  TEST_CASE("particular solution") {
    const AveragedSystem avg = averaged(fig11());
    const RegimeReport rep = classify(avg);
    const ParticularSolution ps = particular_solution(avg, rep.psi0, rep.xi, 4);
    CHECK(ps.rho_k[1] == doctest::Approx(-avg.Omega[2].evaluate(0.0, rep.psi0, 0.0) / avg.eta));
    CHECK(ps.rho_star(0.0) == 0.0);
    CHECK(ps.psi_star(0.0) == doctest::Approx(rep.psi0));
    CHECK_THROWS_AS(particular_solution(avg, rep.psi0, 0.0, 4), SingularSystemError);

    // the truncated rho-equation residual along the particular solution decays like mu^{(h + 2n - 1)/2}
    Example1Params rich = fig11(0.3);
    rich.Z1 = 0.2;
    rich.B0 = 0.4;
    rich.Q0 = -0.05;
    const AveragedSystem ar = averaged(rich);
    const RegimeReport rr = classify(ar);
    REQUIRE(rr.regime == Regime::PhaseLocking);
    const ParticularSolution pr = particular_solution(ar, rr.psi0, rr.xi, rr.dissipation.h);
    std::vector<double> lx, ly;
    for (double t = 1e3; t <= 1e9; t *= 10) {
      const double h = 1e-4 * t;
      auto rho = [&](double s) { return pr.rho_star(ar.envelope.mu(s)); };
      const double drho = (rho(t + h) - rho(t - h)) / (2 * h);
      const double res = drho - ar.field(rho(t), pr.psi_star(ar.envelope.mu(t)), t)(0);
      lx.push_back(std::log(ar.envelope.mu(t)));
      ly.push_back(std::log(std::abs(res)));
    }
    const double n = static_cast<double>(lx.size());
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < lx.size(); ++i) {
      sx += lx[i];
      sy += ly[i];
      sxx += lx[i] * lx[i];
      sxy += lx[i] * ly[i];
    }
    const double slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
    CHECK(slope == doctest::Approx((rr.dissipation.h + 2 * ar.n - 1) / 2.0).epsilon(0.1 / 3.5));
  }

  TEST_CASE("zero field gives a constant path") {
    Example1Params zero = fig11(0.0);
    zero.Q0 = 0.0;
    zero.B1 = 0.0;
    const AveragedSystem avg = averaged(zero);
    const TruncatedPath path = integrate_truncated(avg, Eigen::Vector2d(0.0, 1.3), 10.0, 60.0, 0.5);
    CHECK_FALSE(path.left_domain);
    for (const auto& s : path.state) CHECK((s - Eigen::Vector2d(0.0, 1.3)).norm() == 0.0);
  }

  TEST_CASE("RK4 converges at fourth order") {
    const AveragedSystem avg = averaged(fig11(0.5));
    const Eigen::Vector2d x0(0.3, 1.0);
    auto end = [&](double dt) { return integrate_truncated(avg, x0, 20.0, 80.0, dt).state.back(); };
    const Eigen::Vector2d ref = end(1.0 / 256);
    const double e1 = (end(1.0) - ref).norm(), e2 = (end(0.5) - ref).norm(), e3 = (end(0.25) - ref).norm();
    CHECK(e1 / e2 > 8.0);
    CHECK(e1 / e2 < 32.0);
    CHECK(e2 / e3 > 8.0);
    CHECK(e2 / e3 < 32.0);
  }

  TEST_CASE("attraction to the locked state and drift exit") {
    const Example1Params p = fig11(1.0);
    const AveragedSystem avg = averaged(p);
    const RegimeReport rep = classify(avg);
    REQUIRE(rep.regime == Regime::PhaseLocking);
    const double t0 = 50.0;
    const double need = 20.0 / std::abs(rep.dissipation.gamma_tilde_h);
    double T = t0;
    while (zeta(avg.envelope, rep.dissipation.h, t0, T).value < need) T *= 1.25;
    const Eigen::Vector2d x0(0.05, rep.psi0 + 0.08);
    const TruncatedPath path = integrate_truncated(avg, x0, t0, T, 0.05, 0.0, 1000, 0.5);
    REQUIRE_FALSE(path.left_domain);
    const Eigen::Vector2d xe = path.state.back();
    CHECK(std::abs(xe(1) - rep.psi0) < 0.05);
    CHECK(std::hypot(xe(0), xe(1) - rep.psi0) < std::hypot(x0(0), x0(1) - rep.psi0));

    Example1Params drift = fig11();
    drift.Q0 = -2 * drift.theta * drift.epsilon * drift.epsilon;
    const AveragedSystem ad = averaged(drift);
    const TruncatedPath dp = integrate_truncated(ad, Eigen::Vector2d(0.0, 0.0), 100.0, 1e12, 0.5, 0.0, 1000, 0.5);
    CHECK(dp.left_domain);
    CHECK(std::isfinite(dp.exit_time));
  }
}
