#include <doctest.h>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/tools/roots.hpp>
#include <cmath>
#include <numbers>

#include "resonance/errors.hpp"
#include "resonance/oscillator.hpp"

using namespace resonance;

namespace {

constexpr double kTheta = 1.0 / 32.0;

// Frequency from the period integral over the orbit, x = a sin(theta).
double period_frequency(double theta, double r) {
  const double a2 = (1.0 - std::sqrt(1.0 - 2.0 * theta * r * r)) / theta;
  auto f = [&](double th) {
    const double s = std::sin(th);
    return 1.0 / std::sqrt(1.0 - theta * a2 * (1.0 + s * s) / 2.0);
  };
  const double T =
      4.0 * boost::math::quadrature::gauss_kronrod<double, 61>::integrate(f, 0.0, std::numbers::pi / 2, 15, 1e-15);
  return 2.0 * std::numbers::pi / T;
}

double bisect(const std::function<double(double)>& f, double lo, double hi) {
  auto tol = [](double a, double b) { return std::abs(b - a) < 1e-15; };
  const auto r = boost::math::tools::bisect(f, lo, hi, tol);
  return 0.5 * (r.first + r.second);
}

}  // namespace

TEST_SUITE("oscillator") {
  TEST_CASE("modulus") {
    const DuffingOscillator osc(kTheta);
    CHECK(osc.r_max() == doctest::Approx(4.0));
    const double k = osc.modulus(3.6);
    const double s = 1.0 / std::sqrt(0.2025);
    CHECK(k == doctest::Approx((s - std::sqrt(s * s - 4.0)) / 2.0).epsilon(1e-14));
    CHECK(k == doctest::Approx(0.6268).epsilon(1e-4));
    CHECK(std::abs(std::pow(k + 1.0 / k, -2.0) - kTheta * 3.6 * 3.6 / 2.0) < 1e-14);
    CHECK(osc.modulus(1e-6) < 1e-6);
    CHECK(osc.modulus(4.0 * (1 - 1e-12)) > 0.999);
    CHECK_THROWS_AS(osc.modulus(4.5), OutOfWellError);
  }

  TEST_CASE("frequency against the period integral") {
    const DuffingOscillator osc(kTheta);
    CHECK(osc.frequency(0.0) == doctest::Approx(1.0).epsilon(1e-15));
    double prev = 1.0;
    for (int i = 1; i < 40; ++i) {
      const double r = 3.99 * i / 40.0;
      const double nu = osc.frequency(r);
      CHECK(nu < prev);
      CHECK(nu > 0.0);
      CHECK(nu == doctest::Approx(period_frequency(kTheta, r)).epsilon(1e-12));
      prev = nu;
    }
    const DuffingOscillator small(1e-4);
    const double t = 1e-4;
    CHECK(std::abs(small.frequency(1.0) - (1.0 - 3.0 * t / 8.0 - 35.0 * t * t / 256.0)) < 1e-8);
  }

  TEST_CASE("frequency derivative against a five-point stencil") {
    const DuffingOscillator osc(kTheta);
    for (double r : {0.5, 2.0, 3.6}) {
      const double h = 1e-3;
      const double five = (-osc.frequency(r + 2 * h) + 8 * osc.frequency(r + h) - 8 * osc.frequency(r - h) +
                           osc.frequency(r - 2 * h)) /
                          (12 * h);
      CHECK(std::abs(osc.frequency_derivative(r) / five - 1.0) < 1e-5);
    }
  }

  TEST_CASE("resonant amplitude") {
    const DuffingOscillator osc(kTheta);
    const double r0 = osc.resonant_amplitude(0.75);
    CHECK(r0 == doctest::Approx(3.6).epsilon(0.05 / 3.6));
    CHECK(osc.frequency_derivative(r0) < 0.0);
    CHECK(std::abs(osc.frequency(r0) - 0.75) < 1e-12);
    // independent bisection on the period-integral frequency
    const double oracle = bisect([](double r) { return period_frequency(kTheta, r) - 0.75; }, 0.1, 3.999);
    CHECK(r0 == doctest::Approx(oracle).epsilon(1e-6));
    CHECK(osc.resonant_amplitude(1.0 - 1e-10) < 1e-3);
    CHECK_THROWS_AS(osc.resonant_amplitude(1.2), NoResonanceError);
  }

  TEST_CASE("angle coordinates") {
    const DuffingOscillator osc(kTheta);
    const AngleCoords origin = osc.angle_coords(0.0, 2.0);
    CHECK(std::abs(origin.X(0)) < 1e-15);
    CHECK(origin.X(1) == doctest::Approx(2.0).epsilon(1e-15));
    double worst_energy = 0.0, worst_jac = 0.0, worst_phi = 0.0;
    for (int a = 1; a < 12; ++a) {
      const double r = 3.9 * a / 12.0;
      const double nu = osc.frequency(r);
      for (int b = 0; b < 24; ++b) {
        const double phi = 2.0 * std::numbers::pi * b / 24.0 + 0.1;
        const AngleCoords ac = osc.angle_coords(phi, r);
        worst_energy = std::max(worst_energy, std::abs(2.0 * osc.potential(ac.X(0)) + ac.X(1) * ac.X(1) - r * r));
        const double det = ac.X_phi(0) * ac.X_r(1) - ac.X_r(0) * ac.X_phi(1);
        worst_jac = std::max(worst_jac, std::abs(std::abs(det) - r / nu));
        worst_phi = std::max({worst_phi, std::abs(nu * ac.X_phi(0) - ac.X(1)),
                              std::abs(nu * ac.X_phi(1) + osc.force(ac.X(0)))});
        // phi-partials agree with a difference quotient
        const double h = 1e-6;
        const Eigen::Vector2d fd = (osc.position(phi + h, r) - osc.position(phi - h, r)) / (2 * h);
        CHECK((fd - ac.X_phi).norm() < 1e-8);
      }
    }
    CHECK(worst_energy < 1e-10);
    CHECK(worst_jac < 1e-6);
    CHECK(worst_phi < 1e-9);
  }

  TEST_CASE("action-angle inversion") {
    const DuffingOscillator osc(kTheta);
    const ActionAngle top = osc.action_angle_from_state(0.0, 2.5);
    CHECK(top.r == doctest::Approx(2.5));
    CHECK(std::abs(top.phi) < 1e-12);

    const ActionAngle aa = osc.action_angle_from_state(1.0, 1.0);
    CHECK(aa.r == doctest::Approx(std::sqrt(1.984375)).epsilon(1e-15));
    const double oracle = bisect([&](double phi) { return osc.position(phi, aa.r)(0) - 1.0; }, 0.0, std::numbers::pi / 2);
    CHECK(aa.phi == doctest::Approx(oracle).epsilon(1e-10));

    double worst = 0.0;
    for (int a = 1; a < 10; ++a) {
      const double r = 3.95 * a / 10.0;
      for (int b = 0; b < 32; ++b) {
        const double phi = 2.0 * std::numbers::pi * (b + 0.37) / 32.0;
        const Eigen::Vector2d x = osc.position(phi, r);
        const ActionAngle back = osc.action_angle_from_state(x(0), x(1));
        worst = std::max(worst, (osc.position(back.phi, back.r) - x).norm());
        CHECK(back.phi >= 0.0);
        CHECK(back.phi < 2.0 * std::numbers::pi);
      }
    }
    CHECK(worst < 1e-8);
    CHECK_THROWS_AS(osc.action_angle_from_state(0.0, 5.0), OutOfWellError);
  }
}
