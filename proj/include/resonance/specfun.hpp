#pragma once

#include <cmath>

namespace resonance {

template <typename Scalar>
struct JacobiTriple {
  Scalar sn;
  Scalar cn;
  Scalar dn;
};

// Complete elliptic integral of the first kind K(k), 0 <= k < 1.
template <typename Scalar>
Scalar ellint_k(Scalar k);

// sn, cn, dn by the descending Landen (AGM) scheme.
template <typename Scalar>
JacobiTriple<Scalar> jacobi_sn_cn_dn(Scalar u, Scalar k);

extern template double ellint_k<double>(double);
extern template long double ellint_k<long double>(long double);
extern template JacobiTriple<double> jacobi_sn_cn_dn<double>(double, double);
extern template JacobiTriple<long double> jacobi_sn_cn_dn<long double>(long double, long double);

}  // namespace resonance
