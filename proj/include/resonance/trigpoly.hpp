#pragma once

#include <Eigen/Dense>
#include <array>
#include <complex>
#include <map>
#include <utility>

namespace resonance {

using Complex = std::complex<double>;
using Poly = Eigen::VectorXcd;  // coefficients of R^0, R^1, ...

// Real function sum_{j,l} c_{j,l}(R) exp(i (j Psi + l S / varkappa)), with c_{-j,-l} = conj(c_{j,l}).
class TrigPoly {
 public:
  static constexpr int kMaxJ = 32;
  static constexpr int kMaxSFrequency = 48;
  static constexpr int kMaxDegree = 6;

  using Key = std::pair<int, int>;
  using ModeMap = std::map<Key, Poly>;

  explicit TrigPoly(int varkappa = 1);

  static TrigPoly constant(double c, int varkappa = 1);
  // c R^degree exp(i (j Psi + l S / varkappa)) plus its conjugate partner.
  static TrigPoly real_mode(int j, int l, Complex c, int degree = 0, int varkappa = 1);
  static TrigPoly monomial(double c, int degree, int varkappa = 1);

  int varkappa() const { return varkappa_; }
  const ModeMap& modes() const { return modes_; }
  bool empty() const { return modes_.empty(); }

  // Accumulates into a single mode; callers keep the conjugate partner consistent.
  void add_to_mode(int j, int l, const Poly& p);
  Poly coefficient(int j, int l) const;
  int degree() const;

  double evaluate(double R, double Psi, double S) const;
  Complex evaluate_complex(double R, double Psi, double S) const;

  TrigPoly d_R() const;
  TrigPoly d_Psi() const;
  TrigPoly d_S() const;
  TrigPoly average_S() const;
  // u with s0 d_S u = *this; the S-average must vanish.
  TrigPoly solve_homological(double s0, double tol = 1e-12) const;
  // Polynomial coefficients evaluated at a fixed R.
  TrigPoly set_R(double R) const;
  // Maps modes in (phi, S) to modes in (Psi, S) with phi = kappa S / varkappa + Psi.
  TrigPoly resonant_substitute(int kappa, int varkappa) const;

  void prune(double tol = 1e-14);
  double max_abs_coefficient() const;
  bool is_zero(double tol = 1e-12) const { return max_abs_coefficient() <= tol; }

  TrigPoly& operator+=(const TrigPoly& o);
  TrigPoly& operator-=(const TrigPoly& o);
  TrigPoly& operator*=(double c);
  TrigPoly operator-() const;

  friend TrigPoly operator+(TrigPoly a, const TrigPoly& b) { return a += b; }
  friend TrigPoly operator-(TrigPoly a, const TrigPoly& b) { return a -= b; }
  friend TrigPoly operator*(TrigPoly a, double c) { return a *= c; }
  friend TrigPoly operator*(double c, TrigPoly a) { return a *= c; }
  friend TrigPoly operator*(const TrigPoly& a, const TrigPoly& b);

 private:
  void check_compatible(const TrigPoly& o) const;
  static Poly trim(const Poly& p);

  int varkappa_;
  ModeMap modes_;
};

using TrigPair = std::array<TrigPoly, 2>;

Poly poly_multiply(const Poly& a, const Poly& b);
Poly poly_add(const Poly& a, const Poly& b);
Complex poly_eval(const Poly& p, double x);

}  // namespace resonance
