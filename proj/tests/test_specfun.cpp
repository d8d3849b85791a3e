#include <doctest.h>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/special_functions/ellint_1.hpp>
#include <boost/math/special_functions/jacobi_elliptic.hpp>
#include <cmath>
#include <numbers>

#include "resonance/errors.hpp"
#include "resonance/specfun.hpp"

using namespace resonance;

namespace {

double quadrature_K(double k) {
  auto f = [k](double th) { return 1.0 / std::sqrt(1.0 - k * k * std::sin(th) * std::sin(th)); };
  return boost::math::quadrature::gauss_kronrod<double, 61>::integrate(f, 0.0, std::numbers::pi / 2, 15, 1e-14);
}

}  // namespace

TEST_SUITE("specfun") {
  TEST_CASE("K at the origin and against quadrature") {
    CHECK(ellint_k(0.0) == doctest::Approx(std::numbers::pi / 2).epsilon(1e-15));
    // pinned from the quadrature oracle
    const double k05 = quadrature_K(0.5);
    CHECK(k05 == doctest::Approx(1.6857503548125961).epsilon(1e-13));
    for (double k : {0.1, 0.5, 0.9, 0.99, 0.999999}) {
      if (k <= 0.99) CHECK(std::abs(ellint_k(k) / quadrature_K(k) - 1.0) < 1e-13);
      CHECK(std::abs(ellint_k(k) / boost::math::ellint_1(k) - 1.0) < 1e-13);
    }
  }

  TEST_CASE("K is increasing and rejects k >= 1") {
    double prev = ellint_k(0.0);
    for (int i = 1; i < 100; ++i) {
      const double cur = ellint_k(i / 100.0);
      CHECK(cur > prev);
      prev = cur;
    }
    CHECK_THROWS_AS(ellint_k(1.0), DomainError);
    CHECK_THROWS_AS(ellint_k(1.5), DomainError);
    CHECK_THROWS_AS(ellint_k(-0.1), DomainError);
  }

  TEST_CASE("origin and degenerate moduli") {
    for (double k : {0.0, 0.3, 0.9, 1.0}) {
      const auto j = jacobi_sn_cn_dn(0.0, k);
      CHECK(j.sn == 0.0);
      CHECK(j.cn == doctest::Approx(1.0));
      CHECK(j.dn == doctest::Approx(1.0));
    }
    for (double u : {-3.0, -0.4, 0.7, 2.5, 9.0}) {
      const auto c = jacobi_sn_cn_dn(u, 0.0);
      CHECK(c.sn == doctest::Approx(std::sin(u)).epsilon(1e-15));
      CHECK(c.cn == doctest::Approx(std::cos(u)).epsilon(1e-15));
      CHECK(c.dn == 1.0);
      const auto h = jacobi_sn_cn_dn(u, 1.0);
      CHECK(h.sn == doctest::Approx(std::tanh(u)).epsilon(1e-15));
      CHECK(h.cn == doctest::Approx(1.0 / std::cosh(u)).epsilon(1e-15));
      CHECK(h.dn == doctest::Approx(1.0 / std::cosh(u)).epsilon(1e-15));
    }
  }

  TEST_CASE("identities over a grid") {
    double worst_pyth = 0.0, worst_dn = 0.0, worst_period = 0.0, worst_boost = 0.0;
    for (int a = 0; a <= 60; ++a) {
      const double k = 0.999 * a / 60.0;
      const double K = ellint_k(k);
      for (int b = -40; b <= 40; ++b) {
        const double u = 4.0 * K * b / 40.0 + 0.013;
        const auto j = jacobi_sn_cn_dn(u, k);
        worst_pyth = std::max(worst_pyth, std::abs(j.sn * j.sn + j.cn * j.cn - 1.0));
        worst_dn = std::max(worst_dn, std::abs(j.dn * j.dn + k * k * j.sn * j.sn - 1.0));
        CHECK(std::abs(j.sn) <= 1.0);
        CHECK(std::abs(j.cn) <= 1.0);
        CHECK(j.dn <= 1.0 + 1e-15);
        CHECK(j.dn >= std::sqrt(1.0 - k * k) - 1e-15);
        const auto p = jacobi_sn_cn_dn(u + 4.0 * K, k);
        worst_period = std::max(worst_period, std::abs(p.sn - j.sn));
        double cn, dn;
        const double sn = boost::math::jacobi_elliptic(k, u, &cn, &dn);
        worst_boost = std::max({worst_boost, std::abs(sn - j.sn), std::abs(cn - j.cn), std::abs(dn - j.dn)});
        const auto m = jacobi_sn_cn_dn(-u, k);
        CHECK(m.sn == doctest::Approx(-j.sn).epsilon(1e-14));
        CHECK(m.cn == doctest::Approx(j.cn).epsilon(1e-14));
        CHECK(m.dn == doctest::Approx(j.dn).epsilon(1e-14));
      }
      CHECK(std::abs(jacobi_sn_cn_dn(K, k).sn - 1.0) < 1e-10);
      for (int q = -4; q <= 4; ++q) {
        // exact values at quarter periods: dn = k' at odd multiples of K, 1 at even ones
        const auto j = jacobi_sn_cn_dn(q * K, k);
        const double dn = q % 2 == 0 ? 1.0 : std::sqrt(1.0 - k * k);
        CHECK(std::abs(j.dn - dn) < 1e-12);
        CHECK(std::abs(j.dn * j.dn + k * k * j.sn * j.sn - 1.0) < 1e-12);
      }
    }
    CHECK(worst_pyth < 1e-12);
    CHECK(worst_dn < 1e-12);
    CHECK(worst_period < 1e-10);
    CHECK(worst_boost < 1e-12);
  }

  TEST_CASE("long double instantiation") {
    const long double K = ellint_k(0.5L);
    CHECK(std::abs(static_cast<double>(K) - 1.6857503548125961) < 1e-15);
    const auto j = jacobi_sn_cn_dn(0.8L, 0.6L);
    CHECK(std::abs(static_cast<double>(j.sn * j.sn + j.cn * j.cn) - 1.0) < 1e-15);
  }
}
