#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "resonance/errors.hpp"
#include "resonance/systems.hpp"

using namespace resonance;

namespace {

Example1Params fig11() {
  Example1Params p;
  p.theta = 0.25;
  p.Q0 = -0.01 / 8;
  p.B1 = 1.0;
  p.epsilon = 0.1;
  return p;
}

}  // namespace

TEST_SUITE("systems") {
  TEST_CASE("Example 1 resonance data") {
    for (double theta : {0.25, 0.1, 0.02}) {
      Example1Params p = fig11();
      p.theta = theta;
      const Example1System sys(p);
      CHECK(sys.resonance().r0 == doctest::Approx(1.0 / std::sqrt(2 * theta)).epsilon(1e-14));
      CHECK(sys.resonance().eta == doctest::Approx(-std::sqrt(2 * theta)).epsilon(1e-14));
      CHECK(std::abs(sys.nu(sys.resonance().r0) - 0.5) < 1e-10);
    }
    const Example1System sys(fig11());
    CHECK(sys.resonance().r0 == doctest::Approx(std::sqrt(2.0)));
    CHECK(sys.resonance().eta == doctest::Approx(-1.0 / std::sqrt(2.0)));
    Example1Params bad = fig11();
    bad.s0 = 1.5;
    CHECK_THROWS_AS(Example1System{bad}, NoResonanceError);
  }

  TEST_CASE("Example 1 drift and diffusion") {
    Example1Params p = fig11();
    p.epsilon = 0.0;
    p.Q0 = 0.0;
    const Example1System free(p);
    for (double r : {0.3, 1.0, 1.7}) {
      const Eigen::Vector2d d = free.polar_drift(r, 0.4, 50.0);
      CHECK(std::abs(d(0)) < 1e-15);
      CHECK(d(1) == doctest::Approx(1.0 - 0.25 * r * r));
      CHECK(free.polar_diffusion(r, 0.4, 50.0).isZero());
    }

    Example1Params q = fig11();
    q.B0 = 0.3;
    q.B1 = 0.8;
    q.p = 2;
    const Example1System sys(q);
    const double t = 40.0, r = 1.2, phi = 0.9;
    const double mu = sys.envelope().mu(t), S = sys.S(t);
    const double B = q.B0 + q.B1 * std::sin(S);
    const Eigen::Matrix2d A = sys.polar_diffusion(r, phi, t);
    CHECK(A(0, 0) == doctest::Approx(q.epsilon * mu * mu * (-B * std::sin(phi))));
    CHECK(A(1, 0) == doctest::Approx(q.epsilon * mu * mu * (-B * std::cos(phi) / r)));
    CHECK(A.col(1).isZero());

    const double Q = q.Q0 + q.Q1 * std::sin(S), Z = q.Z0 + q.Z1 * std::sin(S);
    const double e2B2 = q.epsilon * q.epsilon * B * B;
    const Eigen::Vector2d d = sys.polar_drift(r, phi, t);
    const double mu4 = std::pow(mu, 4);
    CHECK(d(0) == doctest::Approx(mu * mu * (Q * r * std::sin(phi) - Z) * std::sin(phi) +
                                  mu4 * e2B2 / (2 * r) * std::cos(phi) * std::cos(phi)));
    CHECK(d(1) == doctest::Approx(1.0 - 0.25 * r * r + mu * mu * (Q * r * std::sin(phi) - Z) * std::cos(phi) / r -
                                  mu4 * e2B2 / (2 * r * r) * std::sin(2 * phi)));
  }

  TEST_CASE("Example 1 series coefficients") {
    Example1Params p = fig11();
    p.Q0 = -0.3;
    p.Q1 = 0.2;
    p.Z0 = 0.1;
    p.Z1 = 0.4;
    const Example1System sys(p);
    const double r0 = sys.resonance().r0;
    const TrigPoly a1 = sys.taylor_coefficient({false, 0, 0, 2}, 0);
    for (double psi : {0.0, 0.7, 2.0}) {
      for (double S : {0.0, 1.1, 4.0}) {
        const double phi = S + psi;
        const double Q = p.Q0 + p.Q1 * std::sin(S), Z = p.Z0 + p.Z1 * std::sin(S);
        const double B = p.B0 + p.B1 * std::sin(S);
        const double ito = p.epsilon * p.epsilon * B * B * std::cos(phi) * std::cos(phi) / (2 * r0);
        CHECK(a1.evaluate(0.0, psi, S) ==
              doctest::Approx(Q * r0 * std::sin(phi) * std::sin(phi) - Z * std::sin(phi) + ito).epsilon(1e-12));
      }
    }
    // every coefficient agrees with pointwise evaluation at random (psi, S)
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> u(0.0, 2 * std::numbers::pi);
    for (const CoefficientTag& tag : {CoefficientTag{false, 0, 0, 2}, CoefficientTag{false, 1, 0, 2},
                                      CoefficientTag{true, 0, 0, 1}, CoefficientTag{true, 1, 0, 1}}) {
      for (int i = 0; i < 10; ++i) {
        const double psi = u(rng), S = u(rng);
        const double direct = sys.coefficient(tag, r0, S + psi, S);
        CHECK(sys.taylor_coefficient(tag, 0).evaluate(0.0, psi, S) == doctest::Approx(direct).epsilon(1e-10));
      }
    }
    Example1Params zero = fig11();
    zero.Q0 = 0.0;
    zero.B1 = 0.0;
    zero.epsilon = 0.0;
    const Example1System z(zero);
    CHECK(z.taylor_coefficient({false, 0, 0, 2}, 0).is_zero());
    CHECK(z.taylor_coefficient({true, 1, 0, 1}, 1).is_zero());
  }

  TEST_CASE("Duffing coefficients against pointwise evaluation") {
    const DuffingSystem sys{DuffingParams{}};
    const double r0 = sys.resonance().r0;
    CHECK(r0 == doctest::Approx(3.6).epsilon(0.05 / 3.6));
    CHECK(sys.resonance().eta < 0.0);
    CHECK(sys.resonance().eta == doctest::Approx(sys.oscillator().frequency_derivative(r0)).epsilon(1e-6));
    const double direct = sys.coefficient({false, 0, 0, 2}, r0, 0.0, 0.0);
    CHECK(sys.taylor_coefficient({false, 0, 0, 2}, 0).evaluate(0.0, 0.0, 0.0) == doctest::Approx(direct).epsilon(1e-9));
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> u(0.0, 4 * std::numbers::pi);
    for (const CoefficientTag& tag : {CoefficientTag{false, 0, 0, 2}, CoefficientTag{false, 1, 0, 2},
                                      CoefficientTag{true, 0, 0, 1}, CoefficientTag{true, 1, 0, 1}}) {
      for (int i = 0; i < 10; ++i) {
        const double psi = u(rng), S = u(rng);
        const double value = sys.coefficient(tag, r0, S / 2 + psi, S);
        CHECK(std::abs(sys.taylor_coefficient(tag, 0).evaluate(0.0, psi, S) - value) < 1e-6);
      }
    }
    // first Taylor order against a difference quotient of the pointwise value
    const double h = 1e-4;
    const double fd = (sys.coefficient({false, 0, 0, 2}, r0 + h, 0.3, 0.0) -
                       sys.coefficient({false, 0, 0, 2}, r0 - h, 0.3, 0.0)) /
                      (2 * h);
    CHECK(sys.taylor_coefficient({false, 0, 0, 2}, 1).evaluate(0.0, 0.3, 0.0) == doctest::Approx(fd).epsilon(1e-6));
  }

  TEST_CASE("Duffing polar chart is the Ito transform of the Cartesian chart") {
    DuffingParams prm;
    prm.B1 = 0.5;
    const DuffingSystem sys(prm);
    const auto& osc = sys.oscillator();
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> ur(1.0, 3.5), up(0.0, 2 * std::numbers::pi);
    for (int i = 0; i < 5; ++i) {
      const double r = ur(rng), phi = up(rng), t = 30.0;
      const Eigen::Vector2d x = osc.position(phi, r);
      const double mu = sys.envelope().mu(t), S = sys.S(t);
      auto angle = [&](const Eigen::Vector2d& y) {
        double a = osc.action_angle_from_state(y(0), y(1)).phi;
        return a + 2 * std::numbers::pi * std::round((phi - a) / (2 * std::numbers::pi));
      };
      const double h = 1e-4;
      const Eigen::Vector2d e2(0.0, h);
      const double dr = (osc.action_angle_from_state(x(0), x(1) + h).r - osc.action_angle_from_state(x(0), x(1) - h).r) / (2 * h);
      const double dphi = (angle(x + e2) - angle(x - e2)) / (2 * h);
      const double d2phi = (angle(x + e2) - 2 * angle(x) + angle(x - e2)) / (h * h);
      const double Bs = prm.B0 + prm.B1 * std::sin(S);
      const Eigen::Matrix2d A = sys.polar_diffusion(r, phi, t);
      const double scale = prm.epsilon * mu * Bs;
      CHECK(A(0, 0) == doctest::Approx(scale * dr).epsilon(1e-6));
      CHECK(A(1, 0) == doctest::Approx(scale * dphi).epsilon(1e-6));
      CHECK(std::abs(sys.angle_hessian_x2(r, phi) - d2phi) < 1e-4);
      // drift: chain rule of the Cartesian drift plus the second-order correction
      const Eigen::Vector2d f = sys.drift(x, t);
      const Eigen::Vector2d e1(h, 0.0);
      const double dr1 = (osc.action_angle_from_state(x(0) + h, x(1)).r - osc.action_angle_from_state(x(0) - h, x(1)).r) / (2 * h);
      const double dphi1 = (angle(x + e1) - angle(x - e1)) / (2 * h);
      const double d2r = 2 * osc.potential(x(0)) / (r * r * r);
      const double corr = 0.5 * scale * scale;
      const Eigen::Vector2d polar = sys.polar_drift(r, phi, t);
      CHECK(polar(0) == doctest::Approx(dr1 * f(0) + dr * f(1) + corr * d2r).epsilon(1e-6));
      CHECK(std::abs(polar(1) - (dphi1 * f(0) + dphi * f(1) + corr * d2phi)) < 1e-5);
    }
  }
}
