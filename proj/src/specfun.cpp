#include "resonance/specfun.hpp"

#include <array>
#include <limits>
#include <numbers>

#include "resonance/errors.hpp"

namespace resonance {

namespace {

constexpr int kMaxAgmSteps = 40;

template <typename Scalar>
void check_modulus(Scalar k, const char* what) {
  if (!(k >= Scalar(0) && k < Scalar(1))) {
    throw DomainError(std::string(what) + ": modulus must satisfy 0 <= k < 1");
  }
}

}  // namespace

template <typename Scalar>
Scalar ellint_k(Scalar k) {
  using std::abs;
  using std::sqrt;
  check_modulus(k, "ellint_k");
  Scalar a = 1;
  Scalar b = sqrt((Scalar(1) - k) * (Scalar(1) + k));
  const Scalar tol = std::numeric_limits<Scalar>::epsilon();
  for (int i = 0; i < kMaxAgmSteps && abs(a - b) > tol * a; ++i) {
    const Scalar an = (a + b) / 2;
    b = sqrt(a * b);
    a = an;
  }
  return std::numbers::pi_v<Scalar> / (a + b);
}

template <typename Scalar>
JacobiTriple<Scalar> jacobi_sn_cn_dn(Scalar u, Scalar k) {
  using std::abs;
  using std::asin;
  using std::cos;
  using std::cosh;
  using std::sin;
  using std::sqrt;
  using std::tanh;
  if (!(k >= Scalar(0) && k <= Scalar(1))) throw DomainError("jacobi_sn_cn_dn: modulus must satisfy 0 <= k <= 1");
  if (!std::isfinite(static_cast<double>(u))) throw DomainError("jacobi_sn_cn_dn: argument must be finite");
  const Scalar tiny = Scalar(1e-12);
  if (k < tiny) {
    // first-order correction in k^2 keeps the result continuous at the switch
    const Scalar m = k * k;
    const Scalar s = sin(u), c = cos(u);
    const Scalar d = (u - s * c) * m / 4;
    return {s - d * c, c + d * s, Scalar(1) - m * s * s / 2};
  }
  if (Scalar(1) - k < tiny) {
    const Scalar sech = Scalar(1) / cosh(u);
    return {tanh(u), sech, sech};
  }

  std::array<Scalar, kMaxAgmSteps + 1> a{}, c{};
  a[0] = 1;
  Scalar b = sqrt((Scalar(1) - k) * (Scalar(1) + k));
  c[0] = k;
  const Scalar tol = std::numeric_limits<Scalar>::epsilon();
  int n = 0;
  while (abs(c[n]) > tol && n < kMaxAgmSteps) {
    a[n + 1] = (a[n] + b) / 2;
    c[n + 1] = (a[n] - b) / 2;
    b = sqrt(a[n] * b);
    ++n;
  }
  Scalar phi = std::ldexp(Scalar(1), n) * a[n] * u;
  for (int i = n; i > 0; --i) {
    phi = (phi + asin(c[i] / a[i] * sin(phi))) / 2;
  }
  const Scalar sn = sin(phi);
  const Scalar cn = cos(phi);
  const Scalar dn = sqrt((Scalar(1) - k * sn) * (Scalar(1) + k * sn));
  return {sn, cn, dn};
}

template double ellint_k<double>(double);
template long double ellint_k<long double>(long double);
template JacobiTriple<double> jacobi_sn_cn_dn<double>(double, double);
template JacobiTriple<long double> jacobi_sn_cn_dn<long double>(long double, long double);

}  // namespace resonance
